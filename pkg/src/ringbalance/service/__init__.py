"""HTTP service wrapping the simulator: request/response models and app."""
