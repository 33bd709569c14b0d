#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfbkit/oracle.hpp"
#include "cfbkit/similarity.hpp"

using namespace cfbkit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

DiagonalKernel lk(double lam) { return lambda_kernel(lam, 8); }

CfbOperator chain(const std::vector<double>& lambdas, const std::vector<AnalyticSymbol>& syms, int N,
                  std::map<std::pair<int, int>, AnalyticSymbol> cof = {}) {
    CfbSpec s;
    for (double l : lambdas) s.kernels.push_back(lk(l));
    s.superdiag = syms;
    s.cofactors = std::move(cof);
    s.N = N;
    return build_cfb(s);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome curvature_closed_form() {
    const auto grid = disk_grid(0.8, 21);
    double worst = 0.0;
    for (double lam : {1.0, 1.5, 2.0, 3.0}) {
        const auto f = curvature_rank1(lk(lam), grid, CurvatureMethod::FiniteDifference);
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const double c = -lam / std::pow(1.0 - std::norm(grid[p]), 2);
            worst = std::max(worst, std::abs(f.values[p].real() - c) / std::abs(c));
        }
    }
    return {worst <= 1e-6, "max relative error " + fmt("%.3e", worst) + " (tol 1e-6)"};
}

Outcome stirling() {
    double drift = 0.0, telescope = 0.0;
    for (double lam : {1.5, 2.0, 3.0}) {
        const auto k = lk(lam);
        const auto s = weight_product_asymptotics(WeightSequence::from_kernel(k, 10001), 10000);
        drift = std::max(drift, std::abs(*s[10000].normalized / *s[1000].normalized - 1.0));
        for (std::size_t n : {0ul, 10ul, 1000ul, 10000ul})
            telescope = std::max(telescope, std::abs(s[n].product * std::sqrt(k.coeff(n + 1)) - 1.0));
    }
    return {drift < 0.01 && telescope <= 1e-12,
            "normalized drift " + fmt("%.3e", drift) + " (tol 1e-2), telescoping " + fmt("%.3e", telescope) + " (tol 1e-12)"};
}

Outcome intertwiner_structure() {
    const int N = 12;
    const auto a = WeightSequence::from_kernel(lk(1), N), b = WeightSequence::from_kernel(lk(2), N);
    const auto r = brute_force_tau(shift_from_kernel(lk(1), N).matrix, shift_from_kernel(lk(2), N).matrix);
    double lower = 0.0, law = 0.0;
    for (Eigen::Index c = 0; c < r.kernel_basis.cols(); ++c) {
        const auto chk = check_intertwiner_structure(unvectorize(r.kernel_basis.col(c), N, N), a, b);
        lower = std::max(lower, chk.below_diagonal);
        law = std::max(law, chk.entry_law);
    }
    const bool ok = r.kernel_basis.cols() > 0 && lower <= 1e-10 && law <= 1e-10;
    return {ok, std::to_string(r.kernel_basis.cols()) + " solutions, below-diagonal " + fmt("%.3e", lower) +
                    ", entry law " + fmt("%.3e", law) + " (tol 1e-10)"};
}

Outcome property_h_agreement() {
    std::ostringstream os;
    bool ok = true;
    const std::size_t n_max = 4096;
    for (const auto& [l1, l2] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}, {2, 3.5}}) {
        const std::size_t len = kNormLimitTail * n_max + 1;
        const auto a = WeightSequence::from_kernel(lk(l1), len), b = WeightSequence::from_kernel(lk(l2), len);
        const auto gap = check_lambda_gap(l1, l2);
        const auto wp = check_weight_product(a, b, n_max);
        const auto nl = check_norm_limit(a, b, n_max);
        const auto bf = brute_force_tau(shift_from_kernel(lk(l1), 24).matrix, shift_from_kernel(lk(l2), 24).matrix);
        for (const auto* v : {&gap, &wp, &nl, &bf.verdict}) ok = ok && v->status == HStatus::Holds;
        os << "(" << l1 << "," << l2 << "): gap " << to_string(gap.status) << ", product " << to_string(wp.status)
           << ", norm-limit " << to_string(nl.status) << " slope " << fmt("%.3f", nl.slope) << ", brute-force "
           << to_string(bf.verdict.status) << " dim(ker∩ran)=" << bf.intersection_dim << "; ";
    }
    Mat nil = Mat::Zero(2, 2);
    nil(0, 1) = 1.0;
    os << "nilpotent 2x2 caveat: " << to_string(brute_force_tau(nil, nil).verdict.status);
    return {ok, os.str()};
}

Outcome recursive_intertwiner_check() {
    const auto one = AnalyticSymbol::constant(1.0);
    const auto T = chain({1, 2, 3}, {one, one}, 16, {{{0, 2}, AnalyticSymbol::identity()}});
    const auto Tt = chain({1, 2, 3}, {one, one}, 16);
    const auto r = recursive_intertwiner(T, Tt);
    const auto d = solve_structured(T.assembled(), Tt.assembled(), Tt.assembled() - T.assembled(), Structure::StrictUpper, 16);
    const double direct = intertwining_residual(Mat::Identity(48, 48) + d.X, T, Tt);
    const double gap = std::abs(direct - r.residual);
    return {r.residual <= 1e-8 && gap <= 1e-7, "recursion residual " + fmt("%.3e", r.residual) + " (tol 1e-8), direct " +
                                                  fmt("%.3e", direct) + ", difference " + fmt("%.3e", gap) + " (tol 1e-7)"};
}

Outcome decision_table() {
    const std::vector<std::pair<cplx, int>> family = {{0.5, 1}, {0.5, 2}, {1.0 / 3.0, 1}, {1.0 / 3.0, 2}, {cplx(0.5, 0.1), 1}};
    std::vector<CfbOperator> ops;
    for (const auto& [a, m] : family)
        ops.push_back(chain({1, 2}, {AnalyticSymbol::from_roots(std::vector<cplx>(m, a), 1.0)}, 16));
    int mismatches = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = 0; j < ops.size(); ++j) {
            const auto v = decide_multiplication_family(ops[i], ops[j]);
            const auto want = i == j ? SimStatus::Similar : SimStatus::NotSimilar;
            if (v.status != want) ++mismatches;
            if (i == j) {
                worst = std::max(worst, v.residual);
                if (v.residual > 1e-8 || v.condition > kWitnessConditionCap) ++mismatches;
            }
        }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches in 25 pairs, worst diagonal witness residual " +
                                 fmt("%.3e", worst) + " (tol 1e-8)"};
}

Outcome bundle_witness_conditions() {
    const auto T = chain({1, 2, 3}, {AnalyticSymbol::from_roots({0.5, 0.5}, 1.0), AnalyticSymbol::from_roots({0.5, 0.5}, 1.0)}, 16);
    const auto Tt = chain({1, 2, 3}, {AnalyticSymbol::from_roots({0.5, 0.5}, 3.0), AnalyticSymbol::from_roots({0.5, 0.5}, 3.0)}, 16);
    const auto v = decide_multiplication_family(T, Tt);
    if (v.status != SimStatus::Similar) return {false, "no multiplication-family witness"};
    std::vector<Mat> Y;
    for (int i = 0; i < 3; ++i) Y.push_back(block(v.witness, i, i, 16));
    const auto bw = witnesses_from_intertwiners(Y);
    const auto grid = disk_grid(0.7, 15);
    const auto good = bundle_witness_check(T, Tt, bw.Phi, grid);
    auto scaled = bw.Phi;
    scaled[0] *= 2.0;
    const auto bad = bundle_witness_check(T, Tt, scaled, grid);
    double c1 = 0.0, c2 = 0.0;
    for (double r : good.curvature_residuals) c1 = std::max(c1, r);
    for (double r : good.sff_residuals) c2 = std::max(c2, r);
    const bool ok = good.status == SimStatus::Similar && c1 <= 1e-5 && c2 <= 1e-6 && bad.status != SimStatus::Similar &&
                    bad.sff_residuals[0] > 1e-6;
    return {ok, "condition (1) " + fmt("%.3e", c1) + " (tol 1e-5), condition (2) " + fmt("%.3e", c2) +
                    " (tol 1e-6), scaled witness condition (2) " + fmt("%.3e", bad.sff_residuals[0])};
}

Outcome weak_homogeneity_cases() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rad(0.0, 0.6), ang(0.0, 6.283185307179586);
    std::vector<MobiusMap> maps;
    for (int i = 0; i < 5; ++i) maps.emplace_back(std::polar(rad(rng), ang(rng)), ang(rng));
    auto run = [&](std::vector<cplx> c) {
        return weak_homogeneity(chain({1, 2}, {AnalyticSymbol::polynomial(std::move(c))}, 32), maps);
    };
    const auto good = run({2.0, 1.0});
    double worst = 0.0;
    for (const auto& s : good.samples) worst = std::max(worst, s.residual);
    const auto zero = run({0.0, 1.0});
    const auto edge = run({-1.0, 1.0});
    const bool ok = good.status == HomStatus::WeaklyHomogeneous && good.samples.size() == 5 && worst <= 1e-6 &&
                    zero.status == HomStatus::NotWeaklyHomogeneous && edge.status == HomStatus::Inconclusive;
    return {ok, std::string("2+z ") + to_string(good.status) + " max residual " + fmt("%.3e", worst) + " (tol 1e-6); z " +
                    to_string(zero.status) + "; z-1 " + to_string(edge.status)};
}

Outcome sff_closed_form() {
    const auto grid = disk_grid(0.7, 21);
    const std::vector<AnalyticSymbol> syms = {AnalyticSymbol::constant(1.0), AnalyticSymbol::identity(),
                                              AnalyticSymbol::from_roots({0.5, 0.5}, 1.0)};
    double worst = 0.0;
    for (const auto& [l1, l2] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}, {2, 3.5}})
        for (const auto& phi : syms) {
            const auto f = sff_generalized(chain({l1, l2}, {phi}, 64), 0, grid);
            for (std::size_t p = 0; p < grid.size(); ++p) {
                const double expect = std::norm(phi.conj_eval(grid[p])) * std::pow(1.0 - std::norm(grid[p]), l2 - l1);
                worst = std::max(worst, std::abs(f.values[p] - expect));
            }
        }
    return {worst <= 1e-6, "max abs error " + fmt("%.3e", worst) + " (tol 1e-6)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"curvature closed form", curvature_closed_form},
        {"Stirling asymptotics and telescoping", stirling},
        {"intertwiner structure of truncated shifts", intertwiner_structure},
        {"Property (H) criteria agreement", property_h_agreement},
        {"I+K recursion", recursive_intertwiner_check},
        {"zero/multiplicity decision table", decision_table},
        {"bundle witness conditions", bundle_witness_conditions},
        {"weak homogeneity", weak_homogeneity_cases},
        {"second fundamental form closed form", sff_closed_form},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const Error& e) {
            o = {false, std::string("error (") + to_string(e.kind()) + "): " + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
