"""spatialbench: procedural spatial-cognition benchmark toolkit.

Generates labeled binary-classification image datasets over five spatial
relations (left/right, front/back, relative size, convexity, straightness)
with exact geometric ground truth, ships deterministic template-matching
classifiers for the single-object tasks, and scores prediction files with
split-stratified reports.
"""

from ._backend import BACKEND
from .errors import (BinarizeTieError, DataError, GenerationBudgetError,
                     NoObjectError, PredictionError, RenderError, ShapeError,
                     SpatialBenchError)
from .geometry import (PairRelation, Rng, Shape, area, centroid, gen_shape,
                       interior_angles, is_convex, pair_relation,
                       straightness_oracle, translate)
from .kernelnet import (KernelBank, TemplateKernel, calibrate_threshold,
                        classify_convexity, classify_straightness,
                        corner_bank, parse_bank, serialize_bank)
from .raster import (PALETTE, Scene, SceneObject, rasterize_scene,
                     render_object_solo, shape_mask)
from .tasks import (DatasetManifest, TaskConfig, gen_convexity,
                    gen_front_back, gen_left_right, gen_size,
                    gen_straightness, load_dataset, make_size_splits,
                    oracle_label, regenerate_scene, write_dataset)
from .evalreport import (EvalReport, PredictionSet, attach_reference,
                         parse_predictions, render_report, score)

__version__ = "0.1.0"
