// SPDX-License-Identifier: Apache-2.0
//
// irscrb: Cramer-Rao bound evaluation and beamforming design for
// reflecting-surface assisted non-line-of-sight sensing.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef IRSCRB_SCENE_HPP
#define IRSCRB_SCENE_HPP

#include "irscrb/core.hpp"
#include "irscrb/random.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace irscrb {

struct PathLoss {
    double k0 = 1e-3;  // linear gain at the reference distance
    double d0 = 1.0;   // meters
    double exponent = 2.5;
};

/// Power gain K0 (d/d0)^(-exponent) over a link of length d meters.
template <typename Real>
Real path_loss(Real distance, Real k0, Real d0, Real exponent) {
    if (!(distance > Real(0))) throw DomainError("path_loss: distance must be positive");
    return k0 * std::pow(distance / d0, -exponent);
}

inline double path_loss(double distance, const PathLoss& model) {
    return path_loss(distance, model.k0, model.d0, model.exponent);
}

struct PointTargetSpec {
    Eigen::Vector2d position{5.0, 0.0};
};

struct ExtendedTargetSpec {
    Eigen::Vector2d center{5.0, 0.0};
    double radius = 0.5;
    int count = 7;
};

/// Geometry, array sizes and budgets of one sensing experiment. All powers linear (W).
struct Scenario {
    Eigen::Vector2d ap_position{0.0, 0.0};
    Eigen::Vector2d irs_position{5.0, 5.0};
    std::variant<PointTargetSpec, ExtendedTargetSpec> target = PointTargetSpec{};
    int antennas = 8;     // M
    int elements = 8;     // N
    int dwell = 256;      // T
    double tx_power = 1.0;        // P0
    double noise_power = 1e-15;   // sigma_R^2
    double rician_factor = 0.5;   // beta_AI; +inf gives pure line of sight
    PathLoss pathloss;
    double spacing_ratio = 0.5;   // IRS element spacing over wavelength
    std::uint64_t seed = 1;

    /// Throws ContractError on the first violated invariant.
    void validate() const;
    bool extended() const { return std::holds_alternative<ExtendedTargetSpec>(target); }
};

/// Angle of `point` seen from the IRS, measured from the array normal.
/// The IRS array lies along +x and faces -y.
double irs_angle(const Scenario& scenario, const Eigen::Vector2d& point);

/// Departure angle at the AP towards the IRS; the AP array lies along +x and faces +y.
double ap_departure_angle(const Scenario& scenario);

/// AP -> IRS channel with its full SVD G = S diag(sigma) Q^H.
class Channel {
public:
    explicit Channel(CMatrix g);

    const CMatrix& g() const { return g_; }
    Eigen::Index elements() const { return g_.rows(); }
    Eigen::Index antennas() const { return g_.cols(); }
    const CMatrix& left() const { return left_; }
    const RVector& singular_values() const { return sigma_; }
    const CMatrix& right() const { return right_; }
    int rank() const { return numerical_rank(sigma_); }

private:
    CMatrix g_;
    CMatrix left_;
    RVector sigma_;
    CMatrix right_;
};

/// Deterministic line-of-sight component a_IRS(theta_in) a_AP(phi_out)^H.
CMatrix line_of_sight(const Scenario& scenario);

/// Rician AP -> IRS channel scaled by the AP-IRS path loss.
Channel make_channel(const Scenario& scenario, Stream& rng);

struct PointTarget {
    double theta = 0.0;
    cd alpha{0.0, 0.0};
};

struct Scatterer {
    double theta = 0.0;
    cd alpha{0.0, 0.0};
};

struct ExtendedTarget {
    CMatrix h;
    std::vector<Scatterer> scatterers;
};

using TargetModel = std::variant<PointTarget, ExtendedTarget>;

/// Target response H: alpha a a^T for a point target, the scatterer sum otherwise.
CMatrix response_matrix(const TargetModel& target, Eigen::Index elements, double spacing_ratio);
CMatrix response_matrix(const std::vector<Scatterer>& scatterers, Eigen::Index elements,
                        double spacing_ratio);

/// Reflection magnitude for a scatterer at distance d from the IRS (unit RCS).
double reflection_magnitude(const Scenario& scenario, double distance);

TargetModel make_target(const Scenario& scenario, Stream& rng);

struct Waveform {
    CMatrix x;  // M x T
    CMatrix coherence() const { return x * x.adjoint() / static_cast<double>(x.cols()); }
};

/// Transmit sample coherence R_x (M x M) and IRS reflection vector v (length N).
struct BeamformerPair {
    CMatrix rx;
    CVector v;
};

/// Waveform whose sample coherence (1/T) X X^H reproduces rx exactly.
Waveform synthesize_waveform(const CMatrix& rx, int dwell);

/// Noise-free echo G^T Phi^T H Phi G X.
CMatrix noiseless_echo(const Channel& channel, const CVector& v, const CMatrix& h, const CMatrix& x);

/// Received echo with i.i.d. CN(0, noise_power) noise.
CMatrix simulate_echo(const Channel& channel, const CVector& v, const TargetModel& target,
                      const Waveform& waveform, double noise_power, double spacing_ratio,
                      Stream& rng);

}  // namespace irscrb

#endif  // IRSCRB_SCENE_HPP
