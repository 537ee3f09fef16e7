"""
torwave API
Simple interface for using torwave in Jupyter notebooks or other Python scripts
"""

from typing import Any, Dict, Optional, Sequence

from torwave.curve import parse_curve, validate_curve
from torwave.errors import TorwaveError
from torwave.experiments import (
    DEFAULT_EPS,
    repulsion_probe,
    run_mc,
    summarize,
    variance_leading_term,
)
from torwave.export_utils import to_plain
from torwave.lattice import (
    angular_fourier,
    arc_statistic_B,
    enumerate_lattice_points,
    spec_to_dict,
)
from torwave.wave import RestrictedWave, parse_ensemble, sample_coefficients
from torwave.zeros import GridConfig, count_zeros


class WaveLab:
    """
    Simple API wrapper around the torwave modules.

    Methods never raise on bad input; they return a dictionary with
    ``success`` and ``error`` keys plus the result fields.
    """

    def __init__(self, curve: str = "circle:0.5,0.5", ensemble: str = "gaussian",
                 points_per_lambda: int = 50) -> None:
        """Store defaults used by every call"""
        self.curve_text = curve
        self.ensemble_name = ensemble
        self.points_per_lambda = points_per_lambda

    def _failure(self, error: Exception, **fields: Any) -> Dict[str, Any]:
        result: Dict[str, Any] = {"success": False, "error": str(error)}
        result.update(fields)
        return result

    def lattice(self, m: int) -> Dict[str, Any]:
        """
        Lattice data for eigenvalue 4 pi^2 m

        Args:
            m: Positive integer

        Returns:
            Dictionary with the lattice points, N, tau(4) and the arc statistic
        """
        try:
            spec = enumerate_lattice_points(m)
            result = spec_to_dict(spec)
            result["tau4"] = angular_fourier(spec, 4) if spec.N else None
            result["arc_B"] = arc_statistic_B(spec) if spec.N else None
            result.update(success=True, error=None)
            return result
        except TorwaveError as e:
            return self._failure(e, N=None, points=[])

    def validate_curve(self, curve: Optional[str] = None) -> Dict[str, Any]:
        """Validation report for a curve string such as oval:2,1,0.5,0.5"""
        try:
            report = validate_curve(parse_curve(curve or self.curve_text))
            return {"success": report.passed, "error": None, **report.to_dict()}
        except TorwaveError as e:
            return self._failure(e)

    def count(self, m: int, seed: int = 0, trial: int = 0,
              curve: Optional[str] = None) -> Dict[str, Any]:
        """
        Count nodal intersections of one random sample with the curve

        Returns:
            Dictionary with count, roots, suspects and certified_fraction
        """
        try:
            spec = enumerate_lattice_points(m)
            sample = sample_coefficients(spec, parse_ensemble(self.ensemble_name), seed, trial)
            rw = RestrictedWave(sample, parse_curve(curve or self.curve_text))
            result = count_zeros(rw, GridConfig(points_per_lambda=self.points_per_lambda))
            return {"success": True, "error": None, **to_plain(result)}
        except TorwaveError as e:
            return self._failure(e, count=None, roots=[])

    def monte_carlo(self, m: int, trials: int = 1000, seed: int = 0,
                    eps: Sequence[float] = DEFAULT_EPS,
                    workers: Optional[int] = None) -> Dict[str, Any]:
        """
        Run a batch and summarize it

        Returns:
            Dictionary with the report fields and the per-trial counts
        """
        try:
            batch = run_mc(
                enumerate_lattice_points(m),
                parse_curve(self.curve_text),
                parse_ensemble(self.ensemble_name),
                trials,
                seed,
                GridConfig(points_per_lambda=self.points_per_lambda),
                workers,
            )
            report = summarize(batch, eps)
            return {
                "success": True,
                "error": None,
                "z_values": batch.z_values.tolist(),
                **to_plain(report),
            }
        except TorwaveError as e:
            return self._failure(e, z_values=[])

    def repulsion(self, m: int, t: float = 0.3, alpha: float = 0.1, beta: float = 0.1,
                  trials: int = 100_000, seed: int = 0) -> Dict[str, Any]:
        """Empirical P(|f(t)| <= alpha, |f'(t)| <= beta lambda) and its ratio to alpha beta"""
        try:
            result = repulsion_probe(
                enumerate_lattice_points(m),
                parse_curve(self.curve_text),
                t,
                parse_ensemble(self.ensemble_name),
                alpha,
                beta,
                trials,
                seed,
            )
            return {"success": True, "error": None, **to_plain(result)}
        except TorwaveError as e:
            return self._failure(e)

    def variance_term(self, m: int, quadrature_points: int = 256) -> Dict[str, Any]:
        try:
            term = variance_leading_term(
                enumerate_lattice_points(m), parse_curve(self.curve_text), quadrature_points
            )
            return {"success": True, "error": None, **to_plain(term)}
        except TorwaveError as e:
            return self._failure(e)

    def get_info(self) -> Dict[str, Any]:
        """Defaults this instance runs with"""
        return {
            "curve": self.curve_text,
            "ensemble": self.ensemble_name,
            "points_per_lambda": self.points_per_lambda,
        }


# Convenience functions for quick usage
def count_nodal_intersections(m: int, seed: int = 0, curve: str = "circle:0.5,0.5") -> int:
    """
    Quick function to count the zeros of one sample

    Returns:
        The count, or -1 when the input is invalid
    """
    result = WaveLab(curve=curve).count(m, seed=seed)
    return result["count"] if result["success"] else -1


def expected_nodal_count(m: int, trials: int = 1000, seed: int = 0) -> Dict[str, Any]:
    """Quick Monte Carlo estimate of the mean count on the default circle"""
    return WaveLab().monte_carlo(m, trials=trials, seed=seed)


# Example usage
if __name__ == "__main__":
    lab = WaveLab()
    print("torwave API")
    print("=" * 30)
    print(f"Defaults: {lab.get_info()}")
    print(f"Lattice m=325: N = {lab.lattice(325)['N']}")
    print(f"Zeros of sample 0 at m=25: {count_nodal_intersections(25)}")
