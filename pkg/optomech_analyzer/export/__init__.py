"""Result writers, run manifests and figures"""

from .report_exporter import (
    MANIFEST_SUFFIX,
    RunManifest,
    to_json_ready,
    write_json,
    write_table_csv,
    write_spectrum_csv,
    file_digest,
    export_fit_to_excel,
    export_metrics_to_excel,
)

from .plots import (
    plot_spectrum,
    plot_psd_comparison,
    plot_overlap_map,
)

__all__ = [
    'MANIFEST_SUFFIX',
    'RunManifest',
    'to_json_ready',
    'write_json',
    'write_table_csv',
    'write_spectrum_csv',
    'file_digest',
    'export_fit_to_excel',
    'export_metrics_to_excel',
    'plot_spectrum',
    'plot_psd_comparison',
    'plot_overlap_map',
]
