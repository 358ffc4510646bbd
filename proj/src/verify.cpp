#include "dofalign/verify.hpp"

#include "dofalign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

namespace dofalign {

namespace {

using Cx = std::complex<double>;

Cx cpow(Cx base, int e) {
    Cx r{1.0, 0.0};
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Guard against monomial overflow: fold extreme magnitudes into the log scale.
void renorm(Eigen::VectorXcd& v, double& log_scale) {
    double mx = v.cwiseAbs().maxCoeff();
    if (mx > 1e100 || (mx > 0.0 && mx < 1e-100)) {
        v /= mx;
        log_scale += std::log(mx);
    }
}

void finalize_column(Eigen::VectorXcd& v, double& log_scale) {
    double nrm = v.norm();
    if (nrm > 0.0) {
        v /= nrm;
        log_scale += std::log(nrm);
    }
}

Eigen::MatrixXcd normalized_columns(const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd out = a;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        double nrm = out.col(c).norm();
        if (nrm > 0.0) out.col(c) /= nrm;
    }
    return out;
}

double smallest_singular(const Eigen::MatrixXcd& a) {
    if (a.cols() == 0) return 1.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1);
}

long long numeric_rank(const Eigen::MatrixXcd& a, double tol) {
    if (a.cols() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    long long rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    return rank;
}

// tau x cols image of a beam matrix through the single-antenna time-expanded
// channel diag(H_{jk}(t)).
Eigen::MatrixXcd image_single(const ChannelRealization& chan, int j, int k,
                              const Eigen::MatrixXcd& v) {
    Eigen::MatrixXcd out(v.rows(), v.cols());
    for (long long t = 1; t <= chan.tau; ++t) out.row(t - 1) = chan.scalar(j, k, t) * v.row(t - 1);
    return out;
}

// M*tau x cols image through the tall expanded channel of antenna p.
Eigen::MatrixXcd image_multi(const ChannelRealization& chan, int j, int k, int p,
                             const Eigen::MatrixXcd& v) {
    const int M = chan.M;
    Eigen::MatrixXcd out(static_cast<long long>(M) * chan.tau, v.cols());
    for (long long t = 1; t <= chan.tau; ++t)
        for (int r = 0; r < M; ++r)
            out.row((t - 1) * M + r) = chan.entry(j, k, t, r, p - 1) * v.row(t - 1);
    return out;
}

// Dominant interferer per receiver; grouped mode borrows the prime's.
std::vector<std::optional<int>> effective_deltas(const DemandSpec& spec, bool grouped) {
    auto metas = receiver_meta(spec);
    std::vector<std::optional<int>> deltas(static_cast<std::size_t>(spec.J));
    if (!grouped) {
        for (int j = 1; j <= spec.J; ++j) deltas[static_cast<std::size_t>(j) - 1] =
            metas[static_cast<std::size_t>(j) - 1].delta;
        return deltas;
    }
    Grouping grouping = compute_grouping(spec);
    for (int j = 1; j <= spec.J; ++j) {
        const auto& top =
            grouping.maximal_sets[static_cast<std::size_t>(
                grouping.assignment[static_cast<std::size_t>(j) - 1])];
        std::optional<int> delta;
        for (int k = 1; k <= spec.K; ++k) {
            if (!std::binary_search(top.begin(), top.end(), k)) {
                delta = k;
                break;
            }
        }
        deltas[static_cast<std::size_t>(j) - 1] = delta;
    }
    return deltas;
}

struct BudgetFailure {
    int receiver = 0;
    long long budget = 0;
    long long cap = 0;
};

// Per-receiver integer-DoF column budget. With messages in nonincreasing-DoF
// order this is exactly the region membership test scaled by kappa.
std::optional<BudgetFailure> check_budget(const DemandSpec& spec,
                                          const std::vector<long long>& dbar, long long kappa) {
    auto metas = receiver_meta(spec);
    for (int j = 1; j <= spec.J; ++j) {
        const auto& meta = metas[static_cast<std::size_t>(j) - 1];
        long long budget = 0;
        for (int m : spec.demand(j)) budget += dbar[static_cast<std::size_t>(m) - 1];
        if (meta.delta) budget += dbar[static_cast<std::size_t>(*meta.delta) - 1];
        long long cap = kappa * spec.M;
        if (budget > cap) return BudgetFailure{j, budget, cap};
    }
    return std::nullopt;
}

// Cache of per-(receiver, aligned-to) multi-antenna assemblers.
class AssemblerCache {
public:
    explicit AssemblerCache(const ChannelRealization& chan) : chan_(chan) {}

    TMultiAssembler& get(int j, int m) {
        auto key = std::make_pair(j, m);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, std::make_unique<TMultiAssembler>(chan_, j, m)).first;
        return *it->second;
    }

private:
    const ChannelRealization& chan_;
    std::map<std::pair<int, int>, std::unique_ptr<TMultiAssembler>> cache_;
};

void check_dimensions(long long plan_tau, const ChannelRealization& chan,
                      const BaseVectors& bases, long long need_bases) {
    if (chan.tau != plan_tau) throw std::invalid_argument("channel tau does not match the plan");
    if (bases.tau != plan_tau)
        throw std::invalid_argument("base vector length does not match the plan");
    if (static_cast<long long>(bases.w.size()) < need_bases)
        throw std::invalid_argument("not enough base vectors for the plan");
}

} // namespace

Beams build_beams(const BeamPlan& plan, const ChannelRealization& chan, const BaseVectors& bases) {
    if (chan.M != 1) throw std::invalid_argument("single-antenna beams require M = 1 channels");
    check_dimensions(plan.tau, chan, bases, plan.dbar.empty() ? 0 : plan.dbar.front());

    std::vector<Eigen::VectorXcd> diag;
    diag.reserve(plan.constraints.size());
    for (const auto& c : plan.constraints) diag.push_back(assemble_T(chan, c.m, c.n, c.j).diag);

    Beams out;
    out.V.resize(static_cast<std::size_t>(plan.spec.K));
    out.log_scale.resize(static_cast<std::size_t>(plan.spec.K));
    for (int k = 1; k <= plan.spec.K; ++k) {
        const auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
        Eigen::MatrixXcd v(plan.tau, static_cast<Eigen::Index>(cols.size()));
        Eigen::VectorXd ls(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            Eigen::VectorXcd col = bases.w[static_cast<std::size_t>(cols[i].base) - 1];
            double scale = 0.0;
            for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
                int a = cols[i].exponents[c];
                if (a == 0) continue;
                for (long long t = 0; t < plan.tau; ++t) col(t) *= cpow(diag[c](t), a);
                renorm(col, scale);
            }
            finalize_column(col, scale);
            v.col(static_cast<Eigen::Index>(i)) = col;
            ls(static_cast<Eigen::Index>(i)) = scale;
        }
        out.V[static_cast<std::size_t>(k) - 1] = std::move(v);
        out.log_scale[static_cast<std::size_t>(k) - 1] = std::move(ls);
    }
    return out;
}

Beams build_beams(const MultiBeamPlan& plan, const ChannelRealization& chan,
                  const BaseVectors& bases) {
    if (chan.M != plan.spec.M) throw std::invalid_argument("channel M does not match the plan");
    check_dimensions(plan.tau, chan, bases, plan.dbar.empty() ? 0 : plan.dbar.front());

    AssemblerCache assemblers(chan);
    // diagonal of each constraint's operator, indexed like plan.constraints
    std::vector<Eigen::VectorXcd> diag(plan.constraints.size());
    std::map<std::tuple<int, int, int, int>, std::vector<Eigen::VectorXcd>> per_np;
    for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
        const auto& con = plan.constraints[c];
        auto key = std::make_tuple(con.j, con.m, con.n, con.p);
        auto it = per_np.find(key);
        if (it == per_np.end())
            it = per_np.emplace(key, assemblers.get(con.j, con.m).diagonals(con.n, con.p)).first;
        diag[c] = it->second[static_cast<std::size_t>(con.q) - 1];
    }

    Beams out;
    out.V.resize(static_cast<std::size_t>(plan.spec.K));
    out.log_scale.resize(static_cast<std::size_t>(plan.spec.K));
    for (int k = 1; k <= plan.spec.K; ++k) {
        const auto& cols = plan.columns[static_cast<std::size_t>(k) - 1];
        Eigen::MatrixXcd v(plan.tau, static_cast<Eigen::Index>(cols.size()));
        Eigen::VectorXd ls(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            auto branch = plan.branch(cols[i].q);
            Eigen::VectorXcd col = bases.w[static_cast<std::size_t>(cols[i].base) - 1];
            double scale = 0.0;
            for (std::size_t c = 0; c < branch.size(); ++c) {
                int a = cols[i].exponents[c];
                if (a == 0) continue;
                const auto& d = diag[static_cast<std::size_t>(branch[c])];
                for (long long t = 0; t < plan.tau; ++t) col(t) *= cpow(d(t), a);
                renorm(col, scale);
            }
            finalize_column(col, scale);
            v.col(static_cast<Eigen::Index>(i)) = col;
            ls(static_cast<Eigen::Index>(i)) = scale;
        }
        out.V[static_cast<std::size_t>(k) - 1] = std::move(v);
        out.log_scale[static_cast<std::size_t>(k) - 1] = std::move(ls);
    }
    return out;
}

std::vector<ConstraintResidual> check_alignment_numeric(const BeamPlan& plan,
                                                        const ChannelRealization& chan,
                                                        const Beams& beams) {
    std::vector<ConstraintResidual> out;
    for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
        const auto& con = plan.constraints[c];
        Eigen::VectorXcd diag = assemble_T(chan, con.m, con.n, con.j).diag;
        auto targets = column_index(plan, con.m);
        const auto& cols_n = plan.columns[static_cast<std::size_t>(con.n) - 1];
        const auto& vn = beams.V[static_cast<std::size_t>(con.n) - 1];
        const auto& vm = beams.V[static_cast<std::size_t>(con.m) - 1];
        double worst = 0.0;
        for (std::size_t i = 0; i < cols_n.size(); ++i) {
            std::vector<int> bumped = cols_n[i].exponents;
            ++bumped[c];
            auto it = targets.find({cols_n[i].base, bumped});
            if (it == targets.end()) {
                worst = std::numeric_limits<double>::infinity();
                break;
            }
            double factor =
                std::exp(beams.log_scale[static_cast<std::size_t>(con.n) - 1](
                             static_cast<Eigen::Index>(i)) -
                         beams.log_scale[static_cast<std::size_t>(con.m) - 1](it->second));
            Eigen::VectorXcd mapped =
                diag.cwiseProduct(vn.col(static_cast<Eigen::Index>(i))) * factor;
            double r = (mapped - vm.col(it->second)).cwiseAbs().maxCoeff();
            worst = std::max(worst, r);
        }
        out.push_back({{con.m, con.n, con.j}, worst});
    }
    return out;
}

std::vector<ConstraintResidual> check_alignment_numeric(const MultiBeamPlan& plan,
                                                        const ChannelRealization& chan,
                                                        const Beams& beams) {
    AssemblerCache assemblers(chan);
    std::vector<ConstraintResidual> out;
    for (std::size_t c = 0; c < plan.constraints.size(); ++c) {
        const auto& con = plan.constraints[c];
        Eigen::VectorXcd diag = assemblers.get(con.j, con.m)
                                    .diagonals(con.n, con.p)[static_cast<std::size_t>(con.q) - 1];
        auto branch = plan.branch(con.q);
        auto within = static_cast<std::size_t>(
            std::find(branch.begin(), branch.end(), static_cast<int>(c)) - branch.begin());
        auto targets = column_index(plan, con.m);
        const auto& cols_n = plan.columns[static_cast<std::size_t>(con.n) - 1];
        const auto& vn = beams.V[static_cast<std::size_t>(con.n) - 1];
        const auto& vm = beams.V[static_cast<std::size_t>(con.m) - 1];
        double worst = 0.0;
        for (std::size_t i = 0; i < cols_n.size(); ++i) {
            if (cols_n[i].q != con.q) continue;
            std::vector<int> bumped = cols_n[i].exponents;
            ++bumped[within];
            auto it = targets.find({con.q, cols_n[i].base, bumped});
            if (it == targets.end()) {
                worst = std::numeric_limits<double>::infinity();
                break;
            }
            double factor =
                std::exp(beams.log_scale[static_cast<std::size_t>(con.n) - 1](
                             static_cast<Eigen::Index>(i)) -
                         beams.log_scale[static_cast<std::size_t>(con.m) - 1](it->second));
            Eigen::VectorXcd mapped =
                diag.cwiseProduct(vn.col(static_cast<Eigen::Index>(i))) * factor;
            double r = (mapped - vm.col(it->second)).cwiseAbs().maxCoeff();
            worst = std::max(worst, r);
        }
        out.push_back({{con.m, con.n, con.p, con.q, con.j}, worst});
    }
    return out;
}

std::vector<double> check_tx_rank(const Beams& beams, long long tau) {
    std::vector<double> margins;
    for (std::size_t k = 0; k < beams.V.size(); ++k) {
        if (beams.V[k].cols() > tau)
            throw std::invalid_argument("transmitter " + std::to_string(k + 1) + " has " +
                                        std::to_string(beams.V[k].cols()) +
                                        " columns, more than tau=" + std::to_string(tau));
        margins.push_back(smallest_singular(normalized_columns(beams.V[k])));
    }
    return margins;
}

std::vector<RxSeparation> check_rx_separation(const BeamPlan& plan,
                                              const ChannelRealization& chan, const Beams& beams,
                                              bool grouped, double rank_tol) {
    const auto& spec = plan.spec;
    auto deltas = effective_deltas(spec, grouped);
    std::vector<RxSeparation> out;
    for (int j = 1; j <= spec.J; ++j) {
        RxSeparation r;
        r.receiver = j;
        r.space_dim = plan.tau;
        const auto& desired = spec.demand(j);
        std::optional<int> delta = deltas[static_cast<std::size_t>(j) - 1];

        long long budget = 0;
        for (int m : desired) budget += plan.dbar[static_cast<std::size_t>(m) - 1];
        if (delta) budget += plan.dbar[static_cast<std::size_t>(*delta) - 1];
        if (budget > plan.kappa * spec.M) {
            r.precondition_ok = false;
            r.precondition_error = "integer DoF budget " + std::to_string(budget) +
                                   " exceeds kappa*M=" + std::to_string(plan.kappa * spec.M) +
                                   " at receiver " + std::to_string(j);
            out.push_back(std::move(r));
            continue;
        }

        long long lambda_cols = 0;
        for (int m : desired) lambda_cols += plan.column_count(m);
        if (delta) lambda_cols += plan.column_count(*delta);
        if (lambda_cols > plan.tau) {
            r.precondition_ok = false;
            r.precondition_error = "separation matrix at receiver " + std::to_string(j) + " has " +
                                   std::to_string(lambda_cols) + " columns with tau=" +
                                   std::to_string(plan.tau) + " (wider than tall)";
            out.push_back(std::move(r));
            continue;
        }

        Eigen::MatrixXcd lambda(plan.tau, lambda_cols);
        Eigen::Index offset = 0;
        for (int m : desired) {
            const auto& v = beams.V[static_cast<std::size_t>(m) - 1];
            lambda.middleCols(offset, v.cols()) = image_single(chan, j, m, v);
            offset += v.cols();
        }
        if (delta) {
            const auto& v = beams.V[static_cast<std::size_t>(*delta) - 1];
            lambda.middleCols(offset, v.cols()) = image_single(chan, j, *delta, v);
        }
        r.margin = smallest_singular(normalized_columns(lambda));

        for (int m : desired) r.signal_cols += plan.column_count(m);
        long long icols = 0;
        for (int n = 1; n <= spec.K; ++n)
            if (!std::binary_search(desired.begin(), desired.end(), n))
                icols += plan.column_count(n);
        Eigen::MatrixXcd interf(plan.tau, icols);
        offset = 0;
        for (int n = 1; n <= spec.K; ++n) {
            if (std::binary_search(desired.begin(), desired.end(), n)) continue;
            const auto& v = beams.V[static_cast<std::size_t>(n) - 1];
            interf.middleCols(offset, v.cols()) = image_single(chan, j, n, v);
            offset += v.cols();
        }
        r.interference_cols = icols;
        r.interference_rank = numeric_rank(normalized_columns(interf), rank_tol);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RxSeparation> check_rx_separation(const MultiBeamPlan& plan,
                                              const ChannelRealization& chan, const Beams& beams,
                                              bool grouped, double rank_tol) {
    const auto& spec = plan.spec;
    const int M = spec.M;
    auto deltas = effective_deltas(spec, grouped);
    std::vector<RxSeparation> out;
    for (int j = 1; j <= spec.J; ++j) {
        RxSeparation r;
        r.receiver = j;
        r.space_dim = static_cast<long long>(M) * plan.tau;
        const auto& desired = spec.demand(j);
        std::optional<int> delta = deltas[static_cast<std::size_t>(j) - 1];

        long long budget = 0;
        for (int m : desired) budget += plan.dbar[static_cast<std::size_t>(m) - 1];
        if (delta) budget += plan.dbar[static_cast<std::size_t>(*delta) - 1];
        if (budget > plan.kappa * M) {
            r.precondition_ok = false;
            r.precondition_error = "integer DoF budget " + std::to_string(budget) +
                                   " exceeds kappa*M=" + std::to_string(plan.kappa * M) +
                                   " at receiver " + std::to_string(j);
            out.push_back(std::move(r));
            continue;
        }

        long long scols = 0;
        for (int m : desired) scols += M * plan.column_count(m);
        Eigen::MatrixXcd signal(r.space_dim, scols);
        Eigen::Index offset = 0;
        for (int m : desired)
            for (int p = 1; p <= M; ++p) {
                const auto& v = beams.V[static_cast<std::size_t>(m) - 1];
                signal.middleCols(offset, v.cols()) = image_multi(chan, j, m, p, v);
                offset += v.cols();
            }

        long long icols = 0;
        for (int n = 1; n <= spec.K; ++n)
            if (!std::binary_search(desired.begin(), desired.end(), n))
                icols += M * plan.column_count(n);
        Eigen::MatrixXcd interf(r.space_dim, icols);
        offset = 0;
        for (int n = 1; n <= spec.K; ++n) {
            if (std::binary_search(desired.begin(), desired.end(), n)) continue;
            for (int p = 1; p <= M; ++p) {
                const auto& v = beams.V[static_cast<std::size_t>(n) - 1];
                interf.middleCols(offset, v.cols()) = image_multi(chan, j, n, p, v);
                offset += v.cols();
            }
        }

        r.signal_cols = scols;
        r.interference_cols = icols;
        Eigen::MatrixXcd basis;
        if (icols > 0) {
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(normalized_columns(interf), Eigen::ComputeThinU);
            long long rank = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > rank_tol) ++rank;
            r.interference_rank = rank;
            basis = svd.matrixU().leftCols(rank);
        }
        r.dim_ok = r.signal_cols + r.interference_rank <= r.space_dim;

        Eigen::MatrixXcd stacked(r.space_dim, scols + basis.cols());
        stacked.leftCols(scols) = normalized_columns(signal);
        if (basis.cols() > 0) stacked.rightCols(basis.cols()) = basis;
        r.margin = smallest_singular(stacked);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

struct NumericResults {
    std::vector<ConstraintResidual> alignment;
    std::vector<double> tx_margins;
    std::vector<RxSeparation> rx;
    std::vector<ConstraintResidual> diag;
};

} // namespace

VerificationReport run_verification(const DemandSpec& spec, const DofPoint& point,
                                    const VerifyFlags& flags) {
    if (static_cast<int>(point.size()) != spec.K)
        throw SpecError("point has " + std::to_string(point.size()) + " components, expected K=" +
                        std::to_string(spec.K));
    bool multi = false;
    switch (flags.mode) {
        case VerifyFlags::Mode::automatic:
            multi = spec.M > 1;
            break;
        case VerifyFlags::Mode::single:
            if (spec.M != 1) throw SpecError("single-antenna mode requires M = 1");
            break;
        case VerifyFlags::Mode::multi:
            if (spec.M < 2) throw SpecError("multi-antenna mode requires M >= 2");
            multi = true;
            break;
    }

    IntegerizedPoint ip = integerize(point);
    DemandSpec pspec = permute_messages(spec, ip.perm);
    if (auto fail = check_budget(pspec, ip.dbar, ip.kappa)) {
        throw OutOfRegionError(
            "receiver " + std::to_string(fail->receiver) + ": desired integer DoF plus the " +
                "dominant interferer's total " + std::to_string(fail->budget) +
                " exceeds kappa*M=" + std::to_string(fail->cap) +
                "; the point is outside the DoF region",
            fail->receiver);
    }

    VerificationReport report;
    report.spec = spec;
    report.point = point;
    report.l = flags.l;
    report.grouped = flags.grouped;
    report.mode = multi ? "multi" : "single";

    // original label of each permuted message index
    std::vector<int> orig(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) orig[static_cast<std::size_t>(ip.perm[k - 1]) - 1] = k;

    BeamPlan plan;
    MultiBeamPlan mplan;
    if (multi) {
        mplan = build_multi_plan(pspec, ip, flags.l,
                                 build_multi_constraints(pspec, flags.grouped), flags.tau_cap);
        report.symbolic_pass = verify_multi_plan_symbolic(mplan).pass;
    } else {
        plan = build_plan(pspec, ip, flags.l, build_constraints(pspec, flags.grouped),
                          flags.tau_cap);
        report.symbolic_pass = verify_plan_symbolic(plan).pass;
    }
    long long tau = multi ? mplan.tau : plan.tau;
    long long bases_needed = ip.dbar.empty() ? 0 : *std::max_element(ip.dbar.begin(), ip.dbar.end());

    NumericResults num;
    std::uint64_t seed = flags.seed;
    for (int attempt = 1;; ++attempt) {
        try {
            ChannelRealization chan = generate_channels(pspec, tau, seed, flags.bounds);
            BaseVectors bases =
                generate_base_vectors(tau, static_cast<int>(bases_needed), seed, flags.bounds);
            if (multi) {
                Beams beams = build_beams(mplan, chan, bases);
                num.alignment = check_alignment_numeric(mplan, chan, beams);
                num.tx_margins = check_tx_rank(beams, tau);
                num.rx = check_rx_separation(mplan, chan, beams, flags.grouped,
                                             flags.rank_tolerance);
                AssemblerCache assemblers(chan);
                std::map<std::tuple<int, int, int, int>, std::vector<double>> residual_cache;
                for (const auto& con : mplan.constraints) {
                    auto key = std::make_tuple(con.j, con.m, con.n, con.p);
                    auto it = residual_cache.find(key);
                    if (it == residual_cache.end())
                        it = residual_cache
                                 .emplace(key, assemblers.get(con.j, con.m)
                                                   .offdiag_residuals(con.n, con.p))
                                 .first;
                    num.diag.push_back({{con.m, con.n, con.p, con.q, con.j},
                                        it->second[static_cast<std::size_t>(con.q) - 1]});
                }
            } else {
                Beams beams = build_beams(plan, chan, bases);
                num.alignment = check_alignment_numeric(plan, chan, beams);
                num.tx_margins = check_tx_rank(beams, tau);
                num.rx = check_rx_separation(plan, chan, beams, flags.grouped,
                                             flags.rank_tolerance);
            }
            break;
        } catch (const SingularChannelError&) {
            if (attempt >= flags.singular_retry_limit) throw;
            num = NumericResults{};
            ++seed;
        }
    }
    report.seed = seed;

    // Map the permuted-space results back to original message labels.
    for (auto res : num.alignment) {
        res.key[0] = orig[static_cast<std::size_t>(res.key[0]) - 1];
        res.key[1] = orig[static_cast<std::size_t>(res.key[1]) - 1];
        report.alignment_residuals.push_back(std::move(res));
    }
    for (auto res : num.diag) {
        res.key[0] = orig[static_cast<std::size_t>(res.key[0]) - 1];
        res.key[1] = orig[static_cast<std::size_t>(res.key[1]) - 1];
        report.diag_residuals.push_back(std::move(res));
    }
    report.tx_rank_margins.resize(static_cast<std::size_t>(spec.K));
    report.dof_fractions.resize(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) {
        int pk = ip.perm[static_cast<std::size_t>(k) - 1];
        report.tx_rank_margins[static_cast<std::size_t>(k) - 1] =
            num.tx_margins[static_cast<std::size_t>(pk) - 1];
        report.dof_fractions[static_cast<std::size_t>(k) - 1] =
            multi ? dof_fraction(mplan, pk) : dof_fraction(plan, pk);
    }
    report.rx_separation = std::move(num.rx);

    report.verdict.symbolic = report.symbolic_pass;
    report.verdict.alignment = true;
    for (const auto& res : report.alignment_residuals)
        report.verdict.alignment &= res.residual < flags.alignment_tolerance;
    report.verdict.tx_rank = true;
    for (double m : report.tx_rank_margins) report.verdict.tx_rank &= m > flags.rank_tolerance;
    report.verdict.rx_separation = true;
    for (const auto& rx : report.rx_separation)
        report.verdict.rx_separation &=
            rx.precondition_ok && rx.dim_ok && rx.margin > flags.rank_tolerance;
    report.verdict.diagonality = true;
    for (const auto& res : report.diag_residuals)
        report.verdict.diagonality &= res.residual < flags.diag_tolerance;
    report.verdict.overall = report.verdict.symbolic && report.verdict.alignment &&
                             report.verdict.tx_rank && report.verdict.rx_separation &&
                             report.verdict.diagonality;
    return report;
}

nlohmann::json report_to_json(const VerificationReport& report) {
    nlohmann::json j;
    j["spec"] = {{"K", report.spec.K}, {"M", report.spec.M}, {"demands", report.spec.demands}};
    nlohmann::json point = nlohmann::json::array();
    for (const auto& d : report.point) point.push_back(to_string(d));
    j["point"] = point;
    j["l"] = report.l;
    j["seed"] = report.seed;
    j["grouped"] = report.grouped;
    j["mode"] = report.mode;
    j["symbolicPass"] = report.symbolic_pass;
    nlohmann::json align = nlohmann::json::array();
    for (const auto& res : report.alignment_residuals)
        align.push_back({{"constraint", res.key}, {"residual", res.residual}});
    j["alignmentResiduals"] = align;
    j["txRankMargins"] = report.tx_rank_margins;
    nlohmann::json rx = nlohmann::json::array();
    for (const auto& r : report.rx_separation) rx.push_back(r.margin);
    j["rxRankMargins"] = rx;
    nlohmann::json diag = nlohmann::json::array();
    for (const auto& res : report.diag_residuals)
        diag.push_back({{"constraint", res.key}, {"residual", res.residual}});
    j["diagResiduals"] = diag;
    nlohmann::json fractions = nlohmann::json::array();
    for (const auto& f : report.dof_fractions) fractions.push_back(to_string(f));
    j["dofFractions"] = fractions;
    j["verdict"] = {{"symbolic", report.verdict.symbolic},
                    {"alignment", report.verdict.alignment},
                    {"txRank", report.verdict.tx_rank},
                    {"rxSeparation", report.verdict.rx_separation},
                    {"diagonality", report.verdict.diagonality},
                    {"overall", report.verdict.overall}};
    return j;
}

} // namespace dofalign
