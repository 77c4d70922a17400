"""Classify hourly air-taxi demand (low / moderate / high) per pickup zone."""
from .config import RunConfig, load_config
from .errors import AirTaxiError, EmptyDatasetError, FormatError, SpecError, TrainingError
from .evaluation import confusion, grid_search, metrics, split_train_test
from .features import Encoder, bin_demand, clean, fit_bins, fit_encoder
from .geo_cluster import ClusterModel, assign_location, kmeans_fit
from .importance import permutation_importance, top_features
from .ingest import parse_trips, parse_weather
from .learners import (DecisionTree, GradientBoosting, LogisticRegression, NeuralNetwork,
                       RandomForest, best_split, load_model, make_learner)
from .synthetic import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"
