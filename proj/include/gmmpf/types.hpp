#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gmmpf {

// Errors ---------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All log-weights are -inf, or a weight vector carries no mass.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// Receiver coincides with a satellite.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a type invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Numeric helpers ------------------------------------------------------------

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle);

// State ----------------------------------------------------------------------

/// Vehicle state in a local east/north frame. Simulation runs track only the
/// horizontal position; replay runs additionally carry heading and the
/// receiver clock-bias offset (expressed in meters).
struct StateVector {
  double px = 0.0;  // east [m]
  double py = 0.0;  // north [m]
  std::optional<double> heading;     // [rad], measured from east, CCW
  std::optional<double> clock_bias;  // [m]

  Eigen::Vector2d position() const { return {px, py}; }

  /// Throws InvariantError if a field is non-finite or heading is unwrapped.
  void validate() const;
};

/// Weighted particle approximation of the state distribution.
struct ParticleSet {
  std::vector<StateVector> particles;
  std::vector<double> weights;

  std::size_t size() const { return particles.size(); }

  static ParticleSet uniform(std::vector<StateVector> states);

  /// Checks equal lengths, N >= 1 and the simplex invariant (1e-9).
  void validate() const;
};

/// A particle in the extended space (x, chi). `measurement` is the 0-based
/// index of the pseudorange the copy is associated with.
struct ExtendedParticle {
  StateVector state;
  std::size_t parent = 0;
  std::size_t measurement = 0;
  double log_weight = 0.0;
};

// Measurements ---------------------------------------------------------------

struct SatelliteState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // [m]
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // [m/s]

  void validate() const;
};

struct PseudorangeMeasurement {
  int sat_id = 0;
  double rho = 0.0;    // [m]
  SatelliteState satellite;
  double sigma = 1.0;  // [m]

  void validate() const;
};

/// Dead-reckoning input for one epoch. In simulation the heading is known
/// (e.g. from a magnetometer); in replay the yaw rate is integrated instead.
struct Odometry {
  double speed = 0.0;                // [m/s]
  std::optional<double> yaw_rate;    // [rad/s]
  std::optional<double> heading;     // [rad], known heading
};

struct EpochMeasurements {
  double time = 0.0;  // [s]
  std::vector<PseudorangeMeasurement> pseudoranges;
  std::optional<Odometry> odometry;
  double odometry_sigma = 0.0;  // [m/s]

  std::size_t size() const { return pseudoranges.size(); }

  /// Requires K >= 1 and valid measurements.
  void validate() const;
};

/// Mixture weights of the measurement likelihood, one per pseudorange.
struct GmmCoefficients {
  std::vector<double> gamma;

  std::size_t size() const { return gamma.size(); }

  static GmmCoefficients uniform(std::size_t k);

  void validate() const;
};

// Weight bookkeeping ---------------------------------------------------------

/// Converts log-weights into a normalized probability vector using
/// log-sum-exp. Entries may be -inf but not all of them.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

/// log(sum(exp(v))), -inf for an all -inf input.
double log_sum_exp(std::span<const double> values);

/// 1 / sum(w^2).
double effective_sample_size(std::span<const double> weights);

/// True if all weights are nonnegative and sum to one within `tol`.
bool is_simplex(std::span<const double> weights, double tol = 1e-9);

}  // namespace gmmpf
