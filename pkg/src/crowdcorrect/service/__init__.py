from .app import PortInUse, StoreLocked, create_app, resolve_store_dir, serve

__all__ = ["create_app", "serve", "resolve_store_dir", "PortInUse", "StoreLocked"]
