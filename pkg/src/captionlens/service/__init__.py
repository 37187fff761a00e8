from captionlens.service.app import ApiError, create_app, serve
from captionlens.service.state import ServiceState, SnapshotView, swap_snapshot

__all__ = [
    "ApiError",
    "ServiceState",
    "SnapshotView",
    "create_app",
    "serve",
    "swap_snapshot",
]
