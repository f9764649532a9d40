"""Text rendering of reports."""
from ui.text_report import (
    render_axiom_report,
    render_classification,
    render_transform_report,
)

__all__ = [
    'render_axiom_report',
    'render_classification',
    'render_transform_report'
]
