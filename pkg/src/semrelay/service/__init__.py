from .app import app, create_app, load_experiment_models

__all__ = ["app", "create_app", "load_experiment_models"]
