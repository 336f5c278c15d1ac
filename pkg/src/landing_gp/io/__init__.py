from .core import (
    database_digest,
    database_to_frame,
    get_default_output_dir,
    load_csv,
    read_json,
    render_csv,
    save_csv,
    write_canonical_csv,
    write_json,
)

__all__ = [
    "database_digest",
    "database_to_frame",
    "get_default_output_dir",
    "load_csv",
    "read_json",
    "render_csv",
    "save_csv",
    "write_canonical_csv",
    "write_json",
]
