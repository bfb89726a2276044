"""Training pipeline for the spill-free trajectory classifier."""

from sfc_trainer.data import DatasetFormatError, TrajectoryDataset, read_dataset
from sfc_trainer.goldens import export_goldens
from sfc_trainer.model import SfcNet, sinusoidal_table
from sfc_trainer.sfcw import WeightFormatError, read_weights, write_weights
from sfc_trainer.train import TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "DatasetFormatError",
    "SfcNet",
    "TrainConfig",
    "TrajectoryDataset",
    "WeightFormatError",
    "__version__",
    "export_goldens",
    "read_dataset",
    "read_weights",
    "sinusoidal_table",
    "train",
    "write_weights",
]
