#include "dofalign/demand.hpp"
#include "dofalign/errors.hpp"
#include "dofalign/plan.hpp"
#include "dofalign/region.hpp"
#include "dofalign/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;
using namespace dofalign;

// Exit code classes; scripts can branch on these.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kValidation = 2,
    kOutOfRegion = 3,
    kCapExceeded = 4,
    kVerificationFailed = 5,
};

struct Options {
    std::string spec_path;
    std::string point_text;
    std::string format = "human";
    std::string mode = "auto";
    int l = 1;
    std::uint64_t seed = 42;
    bool grouped = true;
    double tolerance = 1e-6;
    long long tau_cap = 20000;
};

DemandSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read spec file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

DofPoint load_point(const Options& opt, const DemandSpec& spec) {
    DofPoint point;
    try {
        point = parse_rational_list(opt.point_text);
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("bad --point: ") + e.what());
    }
    if (static_cast<int>(point.size()) != spec.K)
        throw SpecError("--point has " + std::to_string(point.size()) +
                        " components, expected K=" + std::to_string(spec.K));
    for (const auto& d : point)
        if (d < 0) throw SpecError("--point components must be nonnegative");
    return point;
}

VerifyFlags::Mode parse_mode(const std::string& mode) {
    if (mode == "auto") return VerifyFlags::Mode::automatic;
    if (mode == "single") return VerifyFlags::Mode::single;
    if (mode == "multi") return VerifyFlags::Mode::multi;
    throw SpecError("--mode must be auto, single or multi");
}

json rationals_json(const DofPoint& v) {
    json arr = json::array();
    for (const auto& r : v) arr.push_back(to_string(r));
    return arr;
}

void emit(const Options& opt, const json& machine, const std::string& human) {
    if (opt.format == "machine")
        std::cout << machine.dump(2) << "\n";
    else
        std::cout << human;
}

std::string support_text(const std::vector<int>& support, int bound) {
    std::string s;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i) s += " + ";
        s += "d" + std::to_string(support[i]);
    }
    return s + " <= " + std::to_string(bound);
}

int cmd_region(const Options& opt) {
    RegionDescription region = expand_region(load_spec(opt.spec_path));
    json doc;
    json ineqs = json::array();
    std::string human;
    for (const auto& ineq : region.inequalities) {
        json prov = json::array();
        std::string from;
        for (const auto& [j, i] : ineq.provenance) {
            prov.push_back({j, i});
            if (!from.empty()) from += ", ";
            from += "receiver " + std::to_string(j);
            if (i != 0) from += " with interferer " + std::to_string(i);
        }
        ineqs.push_back({{"support", ineq.support}, {"bound", ineq.bound}, {"provenance", prov}});
        human += support_text(ineq.support, ineq.bound) + "   [" + from + "]\n";
    }
    doc["inequalities"] = ineqs;
    doc["minimalSupports"] = minimal_supports(region);
    emit(opt, doc, human);
    return kOk;
}

int cmd_vertices(const Options& opt) {
    RegionDescription region = expand_region(load_spec(opt.spec_path));
    VertexSet vs = enumerate_vertices(region);
    json doc;
    json verts = json::array();
    std::string human;
    for (const auto& v : vs.vertices) {
        verts.push_back(rationals_json(v));
        std::string line = "(";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) line += ", ";
            line += to_string(v[i]);
        }
        human += line + ")\n";
    }
    doc["vertices"] = verts;
    doc["vertexCount"] = vs.vertices.size();
    doc["candidateCount"] = vs.candidate_count;
    human += std::to_string(vs.vertices.size()) + " vertices from " +
             std::to_string(vs.candidate_count) + " candidate systems\n";
    emit(opt, doc, human);
    return kOk;
}

int cmd_maxsum(const Options& opt) {
    RegionDescription region = expand_region(load_spec(opt.spec_path));
    MaxSum best = max_sum_dof(region);
    json doc;
    doc["total"] = to_string(best.total);
    doc["argmax"] = rationals_json(best.argmax);
    std::string human = "total DoF " + to_string(best.total) + " at (";
    for (std::size_t i = 0; i < best.argmax.size(); ++i) {
        if (i) human += ", ";
        human += to_string(best.argmax[i]);
    }
    emit(opt, doc, human + ")\n");
    return kOk;
}

int cmd_primes(const Options& opt) {
    DemandSpec spec = load_spec(opt.spec_path);
    Grouping grouping = compute_grouping(spec);
    auto full = build_constraints(spec, false);
    auto grouped = build_constraints(spec, true);
    json doc;
    doc["groupCount"] = grouping.group_count;
    doc["maximalSets"] = grouping.maximal_sets;
    json assignment = json::array();
    for (int g : grouping.assignment) assignment.push_back(g + 1);
    doc["assignment"] = assignment;
    doc["primes"] = grouping.primes;
    doc["fullConstraintCount"] = full.size();
    doc["groupedConstraintCount"] = grouped.size();
    std::string human;
    for (int g = 0; g < grouping.group_count; ++g) {
        human += "group " + std::to_string(g + 1) + ": prime receiver " +
                 std::to_string(grouping.primes[static_cast<std::size_t>(g)]) + ", demand {";
        const auto& set = grouping.maximal_sets[static_cast<std::size_t>(g)];
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (i) human += ",";
            human += std::to_string(set[i]);
        }
        human += "}\n";
    }
    human += "alignment constraints: " + std::to_string(full.size()) + " full, " +
             std::to_string(grouped.size()) + " grouped\n";
    emit(opt, doc, human);
    return kOk;
}

int cmd_check(const Options& opt) {
    DemandSpec spec = load_spec(opt.spec_path);
    DofPoint point = load_point(opt, spec);
    RegionDescription region = expand_region(spec);
    Membership verdict = contains(region, point);
    json doc;
    doc["inside"] = verdict.inside;
    json tight = json::array();
    for (int idx : verdict.tight)
        tight.push_back(region.inequalities[static_cast<std::size_t>(idx)].support);
    json violated = json::array();
    for (int idx : verdict.violated)
        violated.push_back(region.inequalities[static_cast<std::size_t>(idx)].support);
    doc["tight"] = tight;
    doc["violated"] = violated;
    doc["negativeCoordinates"] = verdict.negative;
    std::string human = verdict.inside ? "inside the DoF region\n" : "outside the DoF region\n";
    human += std::to_string(verdict.tight.size()) + " tight, " +
             std::to_string(verdict.violated.size()) + " violated constraints\n";
    emit(opt, doc, human);
    return verdict.inside ? kOk : kOutOfRegion;
}

json plan_json_single(const BeamPlan& plan, const IntegerizedPoint& ip,
                      const std::vector<int>& orig) {
    const int K = plan.spec.K;
    json doc;
    json cons = json::array();
    for (const auto& c : plan.constraints)
        cons.push_back({orig[static_cast<std::size_t>(c.m) - 1],
                        orig[static_cast<std::size_t>(c.n) - 1], c.j});
    doc["constraints"] = cons;
    doc["Gamma"] = plan.gamma;
    doc["GammaK"] = plan.gamma_k;
    doc["kappa"] = plan.kappa;
    doc["tau"] = plan.tau;
    json counts = json::array();
    json fractions = json::array();
    for (int k = 1; k <= K; ++k) {
        int pk = ip.perm[static_cast<std::size_t>(k) - 1];
        counts.push_back(plan.column_count(pk));
        fractions.push_back(to_string(dof_fraction(plan, pk)));
    }
    doc["columnCounts"] = counts;
    doc["dofFractions"] = fractions;
    doc["perm"] = ip.perm;
    return doc;
}

json plan_json_multi(const MultiBeamPlan& plan, const IntegerizedPoint& ip,
                     const std::vector<int>& orig) {
    const int K = plan.spec.K;
    json doc;
    json cons = json::array();
    for (const auto& c : plan.constraints)
        cons.push_back({orig[static_cast<std::size_t>(c.m) - 1],
                        orig[static_cast<std::size_t>(c.n) - 1], c.p, c.q, c.j});
    doc["constraints"] = cons;
    doc["GammaM"] = plan.gamma_m;
    doc["GammaMq"] = plan.gamma_m_q;
    doc["GammaMkq"] = plan.gamma_m_kq;
    doc["kappa"] = plan.kappa;
    doc["tau"] = plan.tau;
    json counts = json::array();
    json fractions = json::array();
    for (int k = 1; k <= K; ++k) {
        int pk = ip.perm[static_cast<std::size_t>(k) - 1];
        counts.push_back(plan.column_count(pk));
        fractions.push_back(to_string(dof_fraction(plan, pk)));
    }
    doc["columnCounts"] = counts;
    doc["dofFractions"] = fractions;
    doc["perm"] = ip.perm;
    return doc;
}

int cmd_plan(const Options& opt) {
    DemandSpec spec = load_spec(opt.spec_path);
    DofPoint point = load_point(opt, spec);
    RegionDescription region = expand_region(spec);
    Membership membership = contains(region, point);
    if (!membership.inside) {
        int idx = membership.violated.empty() ? -1 : membership.violated.front();
        std::string support =
            idx >= 0 ? support_text(region.inequalities[static_cast<std::size_t>(idx)].support,
                                    region.inequalities[static_cast<std::size_t>(idx)].bound)
                     : "nonnegativity";
        throw OutOfRegionError("point violates " + support, 0);
    }
    VerifyFlags::Mode mode = parse_mode(opt.mode);
    bool multi = mode == VerifyFlags::Mode::automatic ? spec.M > 1
                                                      : mode == VerifyFlags::Mode::multi;
    if (multi && spec.M < 2) throw SpecError("multi-antenna mode requires M >= 2");
    if (!multi && spec.M != 1) throw SpecError("single-antenna mode requires M = 1");

    IntegerizedPoint ip = integerize(point);
    DemandSpec pspec = permute_messages(spec, ip.perm);
    std::vector<int> orig(static_cast<std::size_t>(spec.K));
    for (int k = 1; k <= spec.K; ++k) orig[static_cast<std::size_t>(ip.perm[k - 1]) - 1] = k;

    json doc;
    if (multi) {
        MultiBeamPlan plan = build_multi_plan(pspec, ip, opt.l,
                                              build_multi_constraints(pspec, opt.grouped),
                                              opt.tau_cap);
        doc = plan_json_multi(plan, ip, orig);
    } else {
        BeamPlan plan =
            build_plan(pspec, ip, opt.l, build_constraints(pspec, opt.grouped), opt.tau_cap);
        doc = plan_json_single(plan, ip, orig);
    }
    std::string human = "kappa " + doc["kappa"].dump() + ", tau " + doc["tau"].dump() +
                        ", constraints " + std::to_string(doc["constraints"].size()) +
                        "\ncolumn counts " + doc["columnCounts"].dump() + "\ndof fractions " +
                        doc["dofFractions"].dump() + "\n";
    emit(opt, doc, human);
    return kOk;
}

int cmd_verify(const Options& opt) {
    DemandSpec spec = load_spec(opt.spec_path);
    DofPoint point = load_point(opt, spec);
    VerifyFlags flags;
    flags.l = opt.l;
    flags.seed = opt.seed;
    flags.grouped = opt.grouped;
    flags.mode = parse_mode(opt.mode);
    flags.rank_tolerance = opt.tolerance;
    flags.tau_cap = opt.tau_cap;
    if (opt.l < 1) throw SpecError("--l must be >= 1");
    if (!(opt.tolerance > 0)) throw SpecError("--tolerance must be positive");

    VerificationReport report = run_verification(spec, point, flags);
    json doc = report_to_json(report);
    std::string human = "mode " + report.mode + ", tau per plan, seed " +
                        std::to_string(report.seed) + "\n";
    human += std::string("symbolic containment: ") + (report.verdict.symbolic ? "pass" : "FAIL") +
             "\n";
    double worst_align = 0.0;
    for (const auto& r : report.alignment_residuals) worst_align = std::max(worst_align, r.residual);
    human += "alignment residual (max): " + std::to_string(worst_align) + "\n";
    double worst_tx = 1.0;
    for (double m : report.tx_rank_margins) worst_tx = std::min(worst_tx, m);
    human += "tx rank margin (min): " + std::to_string(worst_tx) + "\n";
    double worst_rx = 1.0;
    for (const auto& r : report.rx_separation) worst_rx = std::min(worst_rx, r.margin);
    human += "rx separation margin (min): " + std::to_string(worst_rx) + "\n";
    if (!report.diag_residuals.empty()) {
        double worst_diag = 0.0;
        for (const auto& r : report.diag_residuals)
            worst_diag = std::max(worst_diag, r.residual);
        human += "operator off-diagonal residual (max): " + std::to_string(worst_diag) + "\n";
    }
    human += std::string("overall: ") + (report.verdict.overall ? "PASS" : "FAIL") + "\n";
    emit(opt, doc, human);
    return report.verdict.overall ? kOk : kVerificationFailed;
}

int fail(const Options& opt, const std::string& cls, const std::string& message, int code) {
    json doc;
    doc["error"] = {{"class", cls}, {"message", message}};
    if (opt.format == "machine")
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << "error (" << cls << "): " << message << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DoF region and interference-alignment verifier for networks with general "
                 "message demands"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool with_point, bool with_plan_flags,
                          bool with_verify_flags) {
        sub->add_option("spec", opt.spec_path, "demand-spec JSON file")->required();
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"human", "machine"}))
            ->capture_default_str();
        if (with_point)
            sub->add_option("--point", opt.point_text,
                            "comma-separated rational DoF point, e.g. 1/3,1/3,1/3,1/3")
                ->required();
        if (with_plan_flags) {
            sub->add_option("--l", opt.l, "exponent range parameter (>= 1)")
                ->capture_default_str();
            sub->add_flag("--grouped,!--full", opt.grouped,
                          "use only prime-receiver alignment constraints (default) or all");
            sub->add_option("--mode", opt.mode, "antenna mode")
                ->check(CLI::IsMember({"auto", "single", "multi"}))
                ->capture_default_str();
            sub->add_option("--tau-cap", opt.tau_cap, "refuse plans whose tau exceeds this")
                ->capture_default_str();
        }
        if (with_verify_flags) {
            sub->add_option("--seed", opt.seed, "channel/base-vector RNG seed")
                ->capture_default_str();
            sub->add_option("--tolerance", opt.tolerance, "rank margin tolerance")
                ->capture_default_str();
        }
    };

    auto* region = app.add_subcommand("region", "expanded DoF region inequalities");
    add_common(region, false, false, false);
    auto* vertices = app.add_subcommand("vertices", "exact vertex enumeration");
    add_common(vertices, false, false, false);
    auto* maxsum = app.add_subcommand("maxsum", "maximize total DoF");
    add_common(maxsum, false, false, false);
    auto* primes = app.add_subcommand("primes", "demand poset grouping and prime receivers");
    add_common(primes, false, false, false);
    auto* check = app.add_subcommand("check", "exact region membership of a point");
    add_common(check, true, false, false);
    auto* plan = app.add_subcommand("plan", "symbolic beamforming plan summary");
    add_common(plan, true, true, false);
    auto* verify = app.add_subcommand("verify", "numeric achievability verification");
    add_common(verify, true, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (region->parsed()) return cmd_region(opt);
        if (vertices->parsed()) return cmd_vertices(opt);
        if (maxsum->parsed()) return cmd_maxsum(opt);
        if (primes->parsed()) return cmd_primes(opt);
        if (check->parsed()) return cmd_check(opt);
        if (plan->parsed()) return cmd_plan(opt);
        if (verify->parsed()) return cmd_verify(opt);
        return kInternal;
    } catch (const SpecError& e) {
        return fail(opt, "validation", e.what(), kValidation);
    } catch (const OutOfRegionError& e) {
        return fail(opt, "out-of-region", e.what(), kOutOfRegion);
    } catch (const CapExceededError& e) {
        return fail(opt, "cap-exceeded", e.what(), kCapExceeded);
    } catch (const EnumerationLimitError& e) {
        return fail(opt, "cap-exceeded", e.what(), kCapExceeded);
    } catch (const std::invalid_argument& e) {
        return fail(opt, "validation", e.what(), kValidation);
    } catch (const std::exception& e) {
        return fail(opt, "internal", e.what(), kInternal);
    }
}
