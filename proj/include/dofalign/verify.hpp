#pragma once

#include "dofalign/channel.hpp"
#include "dofalign/plan.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace dofalign {

// Numeric beamforming matrices, one per transmitter. Columns are stored with
// unit 2-norm; log_scale keeps the logarithm of the true column norm so the
// alignment check can compare directions without monomial overflow.
struct Beams {
    std::vector<Eigen::MatrixXcd> V;
    std::vector<Eigen::VectorXd> log_scale;
};

Beams build_beams(const BeamPlan& plan, const ChannelRealization& chan, const BaseVectors& bases);
Beams build_beams(const MultiBeamPlan& plan, const ChannelRealization& chan,
                  const BaseVectors& bases);

// Residual of one alignment constraint; key is (m,n,j) or (m,n,p,q,j).
struct ConstraintResidual {
    std::vector<int> key;
    double residual = 0.0;
};

/// For every constraint and every column of the aligned transmitter, apply the
/// diagonal operator and measure the max-norm distance to the plan-predicted
/// column of the aligned-to transmitter (after matching the recorded scales).
/// Reports the max residual per constraint.
std::vector<ConstraintResidual> check_alignment_numeric(const BeamPlan& plan,
                                                        const ChannelRealization& chan,
                                                        const Beams& beams);
std::vector<ConstraintResidual> check_alignment_numeric(const MultiBeamPlan& plan,
                                                        const ChannelRealization& chan,
                                                        const Beams& beams);

/// Smallest singular value of each column-normalized beam matrix. An empty
/// matrix scores 1. Throws std::invalid_argument when some transmitter has
/// more columns than tau.
std::vector<double> check_tx_rank(const Beams& beams, long long tau);

struct RxSeparation {
    int receiver = 0;
    bool precondition_ok = true;   // integer-DoF column budget and matrix shape
    std::string precondition_error;
    bool dim_ok = true;            // signal dim + interference rank fits the space
    double margin = 0.0;           // smallest singular value of the separation matrix
    long long signal_cols = 0;
    long long interference_cols = 0;
    long long interference_rank = 0;  // numeric rank at rank_tol
    long long space_dim = 0;          // tau (single) or M*tau (multi)
};

/// Single-antenna: stack the desired images and the dominant interferer's
/// image into one matrix and report its normalized smallest singular value.
/// Grouped mode borrows the dominant interferer of the receiver's prime.
std::vector<RxSeparation> check_rx_separation(const BeamPlan& plan,
                                              const ChannelRealization& chan, const Beams& beams,
                                              bool grouped, double rank_tol);

/// Multi-antenna: rank additivity of the signal stack against an orthonormal
/// basis of the interference union, plus the dimension budget M*tau.
std::vector<RxSeparation> check_rx_separation(const MultiBeamPlan& plan,
                                              const ChannelRealization& chan, const Beams& beams,
                                              bool grouped, double rank_tol);

struct VerifyFlags {
    int l = 1;
    std::uint64_t seed = 42;
    bool grouped = true;
    enum class Mode { automatic, single, multi };
    Mode mode = Mode::automatic;
    double rank_tolerance = 1e-6;
    double alignment_tolerance = 1e-10;
    double diag_tolerance = 1e-9;
    long long tau_cap = 20000;
    ChannelBounds bounds;
    int singular_retry_limit = 3;
};

struct Verdict {
    bool symbolic = false;
    bool alignment = false;
    bool tx_rank = false;
    bool rx_separation = false;
    bool diagonality = false;  // vacuously true in single mode
    bool overall = false;
};

struct VerificationReport {
    DemandSpec spec;   // as given (original message labels)
    DofPoint point;
    int l = 1;
    std::uint64_t seed = 0;  // the seed actually used (advanced on singular retries)
    bool grouped = true;
    std::string mode;  // "single" | "multi"
    bool symbolic_pass = false;
    std::vector<ConstraintResidual> alignment_residuals;  // original labels
    std::vector<double> tx_rank_margins;                  // per original transmitter
    std::vector<RxSeparation> rx_separation;              // per receiver
    std::vector<ConstraintResidual> diag_residuals;       // multi mode only
    std::vector<Rational> dof_fractions;                  // per original message
    Verdict verdict;
};

/// Full pipeline: integerize and reorder the point, gate on the per-receiver
/// integer-DoF column budget (equivalent to exact region membership), build
/// and symbolically verify the plan, then run every numeric check on a seeded
/// realization. Throws OutOfRegionError / CapExceededError /
/// SingularChannelError (the latter only after the retry limit).
VerificationReport run_verification(const DemandSpec& spec, const DofPoint& point,
                                    const VerifyFlags& flags);

nlohmann::json report_to_json(const VerificationReport& report);

} // namespace dofalign
