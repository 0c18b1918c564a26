#include "hyperdyn/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"

namespace hyperdyn {

CohClass CohClass::basis(int dim, int i) {
    if (i < 0 || i >= dim) throw invalid_input("basis index out of range");
    CohClass a = zero(dim);
    a.v[static_cast<std::size_t>(i)] = 1.0;
    return a;
}

CohClass operator+(const CohClass& a, const CohClass& b) {
    if (a.dim() != b.dim()) throw invalid_input("cohomology class dimension mismatch");
    CohClass r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
    return r;
}

CohClass operator*(double t, const CohClass& a) {
    CohClass r = a;
    for (double& x : r.v) x *= t;
    return r;
}

double evaluate(const CohClass& a, std::span<const int> homology) {
    if (homology.size() != a.v.size()) throw invalid_input("cohomology class dimension does not match the lattice");
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * homology[i];
    return s;
}

double evaluate(const CohClass& a, const GroupWord& w) {
    for (int l : w.letters)
        if (std::abs(l) > a.dim()) throw invalid_input("word letter exceeds cohomology dimension");
    return evaluate(a, abelianize(w, a.dim()));
}

ClassSummary summarize_classes(const LatticeRep& lat, int maxlen, const EnumOptions& opts) {
    using Key = std::pair<int, std::vector<int>>;
    using Table = std::map<Key, ClassSummary::Entry>;
    const std::size_t tasks = static_cast<std::size_t>(lat.n_letters());
    std::vector<Table> tables(tasks);
    std::vector<std::uint64_t> counts(tasks, 0);

    // Candidate (L, word) beats incumbent on smaller L, then smaller word.
    auto better = [](const ClassSummary::Entry& c, const ClassSummary::Entry& inc) {
        if (c.length != inc.length) return c.length < inc.length;
        return c.witness < inc.witness;
    };

    for_each_cyclic_class(lat, maxlen, opts, [&](std::size_t task, const WordView& v) {
        if (classify(v.matrix) != ElementClass::Hyperbolic) return;
        ++counts[task];
        ClassSummary::Entry e;
        e.word_len = static_cast<int>(v.codes.size());
        e.homology.assign(v.homology.begin(), v.homology.end());
        e.trace = std::abs(v.matrix.trace());
        e.length = translation_length(v.matrix);
        auto [it, fresh] = tables[task].try_emplace(Key{e.word_len, e.homology});
        if (fresh || e.length < it->second.length) {
            e.witness = word_from_codes(lat, v.codes);
            if (fresh || better(e, it->second)) it->second = std::move(e);
        }
    });

    Table merged;
    ClassSummary out;
    for (std::size_t t = 0; t < tasks; ++t) {
        out.classes += counts[t];
        for (auto& [k, e] : tables[t]) {
            auto [it, fresh] = merged.try_emplace(k, e);
            if (!fresh && better(e, it->second)) it->second = e;
        }
    }
    out.maxlen = maxlen;
    out.dim = lat.n_gens();
    out.convention = lat.convention;
    out.min_length = INFINITY;
    for (auto& [k, e] : merged) {
        out.min_length = std::min(out.min_length, e.length);
        out.entries.push_back(std::move(e));
    }
    return out;
}

bool inverse_closed(const ClassSummary& s) {
    std::map<std::pair<int, std::vector<int>>, double> by_key;
    for (const auto& e : s.entries) by_key[{e.word_len, e.homology}] = e.length;
    for (const auto& e : s.entries) {
        std::vector<int> neg = e.homology;
        for (int& x : neg) x = -x;
        auto it = by_key.find({e.word_len, neg});
        if (it == by_key.end() || std::abs(it->second - e.length) > 1e-9 * e.length) return false;
    }
    return true;
}

double delta_value(const ClassSummary& s, const CohClass& a) {
    if (a.dim() != s.dim) throw invalid_input("cohomology class dimension does not match the lattice");
    double best = 0.0;
    for (const auto& e : s.entries) best = std::max(best, std::abs(evaluate(a, e.homology)) / e.length);
    return best;
}

DeltaEstimate delta_sup(const ClassSummary& s, const CohClass& a) {
    if (a.dim() != s.dim) throw invalid_input("cohomology class dimension does not match the lattice");
    DeltaEstimate out;
    out.maxlen = s.maxlen;
    std::size_t i = 0;
    for (int n = 1; n <= s.maxlen; ++n) {
        for (; i < s.entries.size() && s.entries[i].word_len == n; ++i)
            out.sup = std::max(out.sup, std::abs(evaluate(a, s.entries[i].homology)) / s.entries[i].length);
        out.history.emplace_back(n, out.sup);
    }
    // Ratios of distinct classes can tie up to rounding; report the
    // shortest class within 1e-12 of the max.
    const ClassSummary::Entry* witness = nullptr;
    for (const auto& e : s.entries) {
        if (out.sup > 0.0 && std::abs(evaluate(a, e.homology)) / e.length >= out.sup * (1.0 - 1e-12)) {
            witness = &e;
            break;
        }
    }
    if (witness) {
        out.witness.rep = witness->witness;
        out.witness.length = witness->length;
        out.witness.trace = witness->trace;
        out.witness.homology = witness->homology;
    }
    return out;
}

DeltaEstimate delta_sup(const LatticeRep& lat, const CohClass& a, int maxlen, const EnumOptions& opts) {
    if (a.dim() != lat.n_gens()) throw invalid_input("cohomology class dimension does not match the lattice");
    return delta_sup(summarize_classes(lat, maxlen, opts), a);
}

std::string to_string(DeltaStatus s) {
    switch (s) {
        case DeltaStatus::CertifiedOut: return "CertifiedOut";
        case DeltaStatus::Plausible: return "Plausible";
        case DeltaStatus::Borderline: return "Borderline";
    }
    return "?";
}

DeltaStatus in_delta(double s_n, double margin) {
    if (!(margin > 0.0 && margin < 0.5)) throw invalid_input("margin must lie in (0, 0.5)");
    if (s_n >= 1.0) return DeltaStatus::CertifiedOut;
    if (s_n < 1.0 - margin) return DeltaStatus::Plausible;
    return DeltaStatus::Borderline;
}

std::vector<SlicePoint> delta_slice(const ClassSummary& s, const CohClass& origin, const CohClass& dir1,
                                   const CohClass& dir2, int grid, double extent, double margin) {
    if (grid < 1) throw invalid_input("slice grid must be >= 1");
    if (!(extent > 0.0)) throw invalid_input("slice extent must be positive");
    if (origin.dim() != s.dim || dir1.dim() != s.dim || dir2.dim() != s.dim)
        throw invalid_input("slice vectors must match the lattice dimension");
    // Independence: the Gram determinant must not vanish.
    double d11 = 0, d22 = 0, d12 = 0;
    for (int i = 0; i < s.dim; ++i) {
        const double x = dir1.v[static_cast<std::size_t>(i)], y = dir2.v[static_cast<std::size_t>(i)];
        d11 += x * x;
        d22 += y * y;
        d12 += x * y;
    }
    if (d11 * d22 - d12 * d12 <= 1e-12 * d11 * d22 || d11 == 0.0) throw invalid_input("slice directions are linearly dependent");

    const int side = 2 * grid + 1;
    std::vector<SlicePoint> pts(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    parallel_for(static_cast<std::size_t>(side), [&](std::size_t row) {
        const double sv = extent * (static_cast<int>(row) - grid) / grid;
        for (int col = 0; col < side; ++col) {
            const double tv = extent * (col - grid) / grid;
            SlicePoint& p = pts[row * static_cast<std::size_t>(side) + static_cast<std::size_t>(col)];
            p.s = sv;
            p.t = tv;
            p.value = delta_value(s, origin + sv * dir1 + tv * dir2);
            p.status = in_delta(p.value, margin);
        }
    });
    return pts;
}

std::string slice_csv(const std::vector<SlicePoint>& pts) {
    std::ostringstream os;
    os.precision(17);
    os << "s,t,S_N,status\n";
    for (const auto& p : pts) os << p.s << ',' << p.t << ',' << p.value << ',' << to_string(p.status) << '\n';
    return os.str();
}

std::uint64_t slice_midpoint_violations(const std::vector<SlicePoint>& pts, int grid, double level) {
    const int side = 2 * grid + 1;
    if (pts.size() != static_cast<std::size_t>(side) * static_cast<std::size_t>(side))
        throw invalid_input("slice size does not match grid");
    std::vector<std::pair<int, int>> inside;
    std::vector<char> in(pts.size(), 0);
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
            if (pts[static_cast<std::size_t>(i * side + j)].value < level) {
                in[static_cast<std::size_t>(i * side + j)] = 1;
                inside.emplace_back(i, j);
            }
    std::uint64_t bad = 0;
    for (std::size_t p = 0; p < inside.size(); ++p)
        for (std::size_t q = p + 1; q < inside.size(); ++q) {
            const int si = inside[p].first + inside[q].first, sj = inside[p].second + inside[q].second;
            if (si % 2 || sj % 2) continue;
            bad += !in[static_cast<std::size_t>((si / 2) * side + sj / 2)];
        }
    return bad;
}

double period_shift(const CohClass& a, const ConjClass& c) { return c.length + evaluate(a, c.homology); }

bool GammaAAudit::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

namespace {

double group_distance(const Mat2& p, const Mat2& q) { return std::log(op_norm(p.inverse() * q)); }

}  // namespace

GammaAAudit gamma_a_audit(const LatticeRep& lat, const CohClass& a, int maxlen, int n_samples, std::uint64_t seed,
                          const EnumOptions& opts) {
    if (a.dim() != lat.n_gens()) throw invalid_input("cohomology class dimension does not match the lattice");
    if (n_samples < 2) throw invalid_input("gamma-a audit needs at least 2 samples");
    const ClassSummary summary = summarize_classes(lat, maxlen, opts);
    GammaAAudit rep;
    rep.s_n = delta_value(summary, a);
    if (rep.s_n >= 1.0) throw invalid_input("class is certified outside Delta (S_N >= 1); the deformed action is not audited");
    rep.epsilon = 1.0 - rep.s_n;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Mat2> samples;
    for (int i = 0; i < n_samples; ++i) {
        const double t = unit(rng), y = unit(rng), x = unit(rng);
        samples.push_back(one_param(OneParam::X, t).matrix() * one_param(OneParam::U, y).matrix() *
                          one_param(OneParam::S, x).matrix());
    }
    for (const auto& p : samples)
        for (const auto& q : samples) rep.k0 = std::max(rep.k0, group_distance(p, q));
    rep.violator_bound = 2.0 * rep.k0 / rep.epsilon;

    const GroupWord t1{{1}};
    rep.generator_margin = translation_length(eval_matrix(lat, t1)) - std::abs(evaluate(a, t1));

    struct Acc {
        std::uint64_t classes = 0, fixed = 0;
        double min_margin = INFINITY;
        std::vector<GammaAViolator> violators;
    };
    const std::size_t tasks = static_cast<std::size_t>(lat.n_letters());
    std::vector<Acc> acc(tasks);
    for_each_cyclic_class(lat, maxlen, opts, [&](std::size_t task, const WordView& v) {
        if (classify(v.matrix) != ElementClass::Hyperbolic) return;
        Acc& ac = acc[task];
        ++ac.classes;
        const double len = translation_length(v.matrix);
        const double av = evaluate(a, v.homology);
        const double margin = len - std::abs(av);
        ac.min_margin = std::min(ac.min_margin, margin);
        if (std::abs(margin) <= 1e-9 * len) {
            const Mat2 xa = one_param(OneParam::X, av).matrix();
            for (const auto& p : samples)
                if (group_distance(p, v.matrix * p * xa) <= 1e-9) {
                    ++ac.fixed;
                    break;
                }
        }
        if (2.0 * rep.k0 + std::abs(av) >= len) ac.violators.push_back({word_from_codes(lat, v.codes), len, av, 0.0});
    });
    rep.min_margin = INFINITY;
    for (auto& ac : acc) {
        rep.classes_checked += ac.classes;
        rep.fixed_point_classes += ac.fixed;
        rep.min_margin = std::min(rep.min_margin, ac.min_margin);
        for (auto& v : ac.violators) rep.violators.push_back(std::move(v));
    }

    parallel_for(rep.violators.size(), [&](std::size_t i) {
        GammaAViolator& v = rep.violators[i];
        const Mat2 g = eval_matrix(lat, v.word);
        const Mat2 xa = one_param(OneParam::X, v.a_value).matrix();
        double best = INFINITY;
        for (const auto& p : samples) {
            const Mat2 moved = g * p * xa;
            for (const auto& q : samples) best = std::min(best, group_distance(moved, q));
        }
        v.min_displacement = best;
    });
    rep.min_violator_displacement = INFINITY;
    for (const auto& v : rep.violators) {
        rep.violators_bounded = rep.violators_bounded && v.length <= rep.violator_bound;
        rep.min_violator_displacement = std::min(rep.min_violator_displacement, v.min_displacement);
    }

    auto add = [&](std::string name, bool pass, std::string detail) { rep.checks.push_back({std::move(name), pass, std::move(detail)}); };
    add("class-margins", rep.min_margin > 0.0, "min L - |a| = " + std::to_string(rep.min_margin));
    add("freeness", rep.fixed_point_classes == 0, std::to_string(rep.fixed_point_classes) + " classes fix a sample point");
    add("violators-bounded", rep.violators_bounded,
        std::to_string(rep.violators.size()) + " violators, bound " + std::to_string(rep.violator_bound));
    add("violator-displacement", rep.violators.empty() || rep.min_violator_displacement > 0.0,
        "min displacement " + std::to_string(rep.min_violator_displacement));
    return rep;
}

}  // namespace hyperdyn
