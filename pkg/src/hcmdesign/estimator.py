"""scikit-learn style wrapper around :func:`hcmdesign.drive.evaluate_design`.

Rows of ``X`` are geometries ``(l, D, t, h, r)``. ``transform`` maps each row
to the numeric evaluation columns and ``predict`` to a feasibility flag, so
the design chain can sit inside a ``Pipeline`` or be driven by
``ParameterGrid``.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .catalog import load_catalog
from .drive import ALPHA_MIN, SERVO_CAP_MODES, evaluate_design
from .errors import ValidationError
from .model import Geometry
from .search import is_feasible

FEATURES_IN = ("l", "D", "t", "h", "r")
FEATURES_OUT = (
    "L1",
    "L2",
    "A1",
    "P_cr",
    "U_barr",
    "T_act",
    "u_L1",
    "u_tip",
    "t_star",
    "f_m_hcm",
    "alpha",
    "f_m_servo",
    "f_design",
    "speed_lo",
    "speed_hi",
    "moving_mass",
)


def check_geometry_array(X):
    """Validate a geometry matrix; returns a float64 array of shape (n, 5)."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=True)
    if X.shape[1] != len(FEATURES_IN):
        raise ValidationError(f"expected {len(FEATURES_IN)} columns {FEATURES_IN}, got {X.shape[1]}", field="X")
    return X


class HcmDesignEvaluator(TransformerMixin, BaseEstimator):
    """Evaluate ribbon geometries against one material/servo pair.

    Parameters
    ----------
    material, servo : str
        Catalog names.
    closure, pcr : optional
        A1 closure and critical-load model (see :mod:`hcmdesign.model`).
    servo_cap : {"reference", "computed"}
    alpha_min : float
        Design factor threshold used by ``predict``.
    f_target : float
        Minimum design frequency used by ``predict`` (Hz).
    catalog : str or None
        Catalog file; the built-in catalog when None.
    """

    def __init__(
        self,
        material="CFRP",
        servo="A66BHLW",
        closure=None,
        pcr=None,
        servo_cap="reference",
        alpha_min=ALPHA_MIN,
        f_target=0.0,
        catalog=None,
    ):
        self.material = material
        self.servo = servo
        self.closure = closure
        self.pcr = pcr
        self.servo_cap = servo_cap
        self.alpha_min = alpha_min
        self.f_target = f_target
        self.catalog = catalog

    def fit(self, X=None, y=None):
        """Resolve catalog entries; ``X`` is only validated."""
        if self.servo_cap not in SERVO_CAP_MODES:
            raise ValidationError(f"servo_cap must be one of {SERVO_CAP_MODES}", field="servo_cap")
        if X is not None:
            X = check_geometry_array(X)
            self.n_features_in_ = X.shape[1]
        else:
            self.n_features_in_ = len(FEATURES_IN)
        cat = load_catalog(self.catalog)
        self.material_ = cat.material(self.material)
        self.servo_ = cat.servo(self.servo)
        return self

    def evaluate(self, X):
        """List of :class:`~hcmdesign.drive.DesignEvaluation`, one per row."""
        check_is_fitted(self, ("material_", "servo_"))
        X = check_geometry_array(X)
        return [
            evaluate_design(
                Geometry(*map(float, row)),
                self.material_,
                self.servo_,
                closure=self.closure,
                pcr=self.pcr,
                servo_cap=self.servo_cap,
                alpha_min=self.alpha_min,
            )
            for row in X
        ]

    def transform(self, X):
        evaluations = self.evaluate(X)
        out = np.empty((len(evaluations), len(FEATURES_OUT)))
        for i, e in enumerate(evaluations):
            out[i] = [getattr(e, name) for name in FEATURES_OUT]
        return out

    def predict(self, X):
        """Boolean feasibility per row (design factor and target frequency)."""
        return np.array([is_feasible(e, self.alpha_min, self.f_target) for e in self.evaluate(X)], dtype=bool)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURES_OUT, dtype=object)
