#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace raceway {

using Index = Eigen::Index;

using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;
using VectorX = Eigen::VectorXd;

// One column per cell.
using Matrix3X = Eigen::Matrix3Xd;

inline constexpr int kNumSpecies = 8;

template <typename Scalar>
using SpeciesVector = Eigen::Matrix<Scalar, kNumSpecies, 1>;

// Species x cells, one column per cell.
using SpeciesMatrix = Eigen::Matrix<double, kNumSpecies, Eigen::Dynamic>;

// Row order of the species everywhere in the library.
enum Species : int { kA = 0, kP1, kP2, kN1, kN2, kN3, kD, kO };

inline constexpr const char* kSpeciesNames[kNumSpecies] = {"A",  "P1", "P2", "N1",
                                                           "N2", "N3", "D",  "O"};

/// Invalid configuration or violated type invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step could not be completed (CFL violation, solver failure, dry cell, NaN).
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace raceway
