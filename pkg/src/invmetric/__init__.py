"""Conformally invariant metrics of planar domains.

Densities and integrated distances for the Poincare, pseudohyperbolic,
Kobayashi, Caratheodory, and quasihyperbolic metrics on the unit disc, upper
half-plane, annuli, and smooth Jordan domains, with geodesic approximation,
boundary blow-up estimates, and applications (contraction fixed points,
approach regions, automorphism-orbit escape, metric-ball decay).
"""

from .applications import (FixedPointReport, OrbitReport,
                           RegionComparisonReport, contraction_factor_estimate,
                           epsilon_margin, farkas_ritt_fixed_point,
                           lindelof_region_comparison, metric_ball_diameter,
                           orbit_boundary_escape)
from .densities import (AnalyticDiscs, DensityBound, DiscValuedMaps,
                        MetricKind, annulus_covering_search, annulus_density,
                        caratheodory_density, density_bound, kobayashi_density,
                        poincare_density, pseudohyperbolic,
                        quasihyperbolic_density, schwarz_pick_gap)
from .domains import (Annulus, ApproachRegionParams, Domain, SmoothDomain,
                      UnitDisc, UpperHalfPlane, domain_from_json,
                      domain_to_json)
from .errors import (AmbiguousProjectionError, BracketInversionError,
                     CurveExitsDomainError, EmptyFamilyError,
                     GridDisconnectedError, InvMetricError,
                     NonEscapingOrbitError, NotSelfMapError, NumericError,
                     PointOutsideDomainError, PoleError, QuadratureError)
from .geodesy import (Curve, DistanceResult, adaptive_simpson,
                      caratheodory_distance_lower, completeness_probe,
                      curve_length, distance, geodesic_witness,
                      poincare_disc_distance)
from .maps import (AffineMap, BlaschkeProduct, Composition, HolomorphicMap,
                   MobiusMap, Polynomial, RationalMap, compose,
                   disc_image_bound, random_disc_self_map)
from .mobius import (MobiusTransform, cayley, cayley_derivative,
                     cayley_inverse, cayley_inverse_derivative, mobius_to_zero)

__version__ = "1.0.0"
