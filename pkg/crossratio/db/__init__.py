"""
File storage components.
"""
from crossratio.db.file_store import store, FileStore, dump_json

__all__ = ["store", "FileStore", "dump_json"]
