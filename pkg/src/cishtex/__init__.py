"""Texture-based tile classification of chromogenic in-situ hybridization images.

Pipeline: load raster -> circular tile grid -> per-tile co-occurrence texture
descriptor (13 statistics on Brightness and Saturation) -> 2-D reduction
(SVD or PCA) -> seeded fuzzy c-means with FPC validity sweep -> class maps
and a blinded expert-evaluation workflow with confusion matrices.
"""

__version__ = "0.1.0"

from .clustering import (FcmConfig, FuzzyPartition, SweepEntry, canonicalize,
                         fcm, fpc, hard_assign, sweep_clusters)
from .errors import (ConfigInvalid, DimensionMismatch, EmptyGrid,
                     InvalidBinCount, MissingClassScore, NoValidPairs,
                     OutOfRangeScore, PipelineError, StageInputMissing,
                     TooFewPoints, UnknownTile, UnreadableFile,
                     UnsupportedBitDepth)
from .evaluation import (AnnotationRecord, ClassGrade, EvaluationReport,
                         GradingScheme, SamplingManifest, TileGrade,
                         aggregate, confusion, grade_classes, sample_tiles)
from .imaging import (Channel, ChannelPlane, RasterImage, TissueMask,
                      channel_values, hsb_to_rgb, load_image, load_mask,
                      quantize_channel, rgb_to_hsb)
from .reduction import (FeatureMatrix, ReducedMatrix, ReductionMethod,
                        pca_reduce, reduce_features, svd_reduce)
from .rendering import PALETTE, render_class_map, render_fpc_curve, render_legend
from .texture import (FeatureVector, Glcm, compute_glcm, extract_features,
                      haralick_features)
from .tiling import Tile, TileSpec, build_grid
