#include "hyperdyn/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"

namespace hyperdyn {

namespace {

constexpr double kPi = std::numbers::pi;

int letter_code(int letter, int n_gens) { return letter > 0 ? letter - 1 : n_gens + (-letter - 1); }

int code_letter(int code, int n_gens) { return code < n_gens ? code + 1 : -(code - n_gens + 1); }

struct Alphabet {
    int n_gens = 0;
    std::vector<Mat2> mats;  // by code
    std::vector<int> inv;    // inverse code
    std::vector<std::vector<std::int8_t>> relator_rotations;  // relator and inverse, all rotations, as codes

    explicit Alphabet(const LatticeRep& lat) : n_gens(lat.n_gens()) {
        const int k = lat.n_letters();
        mats.resize(static_cast<std::size_t>(k));
        inv.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < n_gens; ++i) {
            mats[static_cast<std::size_t>(i)] = lat.gens[static_cast<std::size_t>(i)].matrix();
            mats[static_cast<std::size_t>(n_gens + i)] = lat.gens[static_cast<std::size_t>(i)].matrix().inverse();
            inv[static_cast<std::size_t>(i)] = n_gens + i;
            inv[static_cast<std::size_t>(n_gens + i)] = i;
        }
        const GroupWord rinv = inverse(lat.relator);
        for (const GroupWord* r : {&lat.relator, &rinv}) {
            for (std::size_t s = 0; s < r->size(); ++s) {
                std::vector<std::int8_t> rot;
                for (int l : rotate(*r, s).letters) rot.push_back(static_cast<std::int8_t>(letter_code(l, n_gens)));
                relator_rotations.push_back(std::move(rot));
            }
        }
    }

    // More than half of some relator rotation occurs in w (cyclically when asked).
    bool relator_majority(std::span<const std::int8_t> w, bool cyclic) const {
        const std::size_t m = w.size();
        for (const auto& rho : relator_rotations) {
            const std::size_t n = rho.size();
            const std::size_t need = n / 2 + 1;
            if (need > m) continue;
            const std::size_t starts = cyclic ? m : m - need + 1;
            for (std::size_t i = 0; i < starts; ++i) {
                std::size_t len = 0;
                while (len < n && len < m && (cyclic || i + len < m) && w[(i + len) % m] == rho[len]) ++len;
                if (len >= need) return true;
            }
        }
        return false;
    }
};

// Node budget shared by the tasks of one enumeration.
class Budget {
public:
    explicit Budget(std::uint64_t limit) : limit_(limit) {}
    void add(std::uint64_t n) {
        if (used_.fetch_add(n) + n > limit_) throw resource_limit("enumeration exceeded the node budget of " + std::to_string(limit_));
    }

private:
    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
};

class LocalCounter {
public:
    explicit LocalCounter(Budget& b) : budget_(b) {}
    ~LocalCounter() = default;
    void tick() {
        if (++pending_ == 4096) flush();
    }
    void flush() {
        budget_.add(pending_);
        pending_ = 0;
    }

private:
    Budget& budget_;
    std::uint64_t pending_ = 0;
};

std::vector<std::int8_t> least_rotation(std::span<const std::int8_t> w) {
    const std::size_t n = w.size();
    std::size_t best = 0;
    for (std::size_t s = 1; s < n; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = w[(s + i) % n], y = w[(best + i) % n];
            if (x != y) {
                if (x < y) best = s;
                break;
            }
        }
    }
    std::vector<std::int8_t> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = w[(best + i) % n];
    return r;
}

}  // namespace

std::vector<GroupWord> octagon_relator_candidates() {
    return {
        parse_word("1.-2.3.-4.-1.2.-3.4"),
        parse_word("1.2.3.4.-1.-2.-3.-4"),
        parse_word("-1.-2.1.2.-3.-4.3.4"),
        parse_word("1.-2.-3.4.-1.2.3.-4"),
    };
}

LatticeRep octagon_lattice() {
    LatticeRep lat;
    lat.genus = 2;
    const double lb = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const Mat2 b = Mat2::diag(std::exp(lb / 2), std::exp(-lb / 2));
    for (int k = 0; k < 4; ++k) {
        // Hyperbolic rotation by k pi/4 about i is the matrix rotation by k pi/8.
        const Mat2 r = Mat2::rotation(k * kPi / 8);
        lat.gens.emplace_back(r * b * r.inverse(), 0);
    }
    for (const auto& cand : octagon_relator_candidates()) {
        lat.relator = cand;
        if (psl_distance(eval_matrix(lat, cand), Mat2::identity()) <= lat.tol) {
            lat.convention = "octagon-g2/T_k=Rot(k*pi/4)X^{L_B}Rot(-k*pi/4)/relator=" + to_string(cand);
            return lat;
        }
    }
    throw Error(ErrorKind::Internal, "construction-failed", "no octagon relator candidate closes to +-I");
}

CoverElement eval(const LatticeRep& lat, const GroupWord& w) {
    CoverElement r;
    for (int l : w.letters) {
        const int g = std::abs(l);
        if (g < 1 || g > lat.n_gens()) throw invalid_input("word letter out of range for lattice");
        const CoverElement& x = lat.gens[static_cast<std::size_t>(g - 1)];
        r = l > 0 ? r * x : r * x.inverse();
    }
    return r;
}

Mat2 eval_matrix(const LatticeRep& lat, const GroupWord& w) {
    Mat2 r;
    for (int l : w.letters) {
        const int g = std::abs(l);
        if (g < 1 || g > lat.n_gens()) throw invalid_input("word letter out of range for lattice");
        const Mat2& x = lat.gens[static_cast<std::size_t>(g - 1)].matrix();
        r = r * (l > 0 ? x : x.inverse());
    }
    return r;
}

std::uint64_t count_reduced_words(int n_letters, int maxlen) {
    std::uint64_t total = 0, level = static_cast<std::uint64_t>(n_letters);
    for (int len = 1; len <= maxlen; ++len) {
        total += level;
        if (total > (1ULL << 62)) return total;
        level *= static_cast<std::uint64_t>(n_letters - 1);
    }
    return total;
}

GroupWord word_from_codes(const LatticeRep& lat, std::span<const std::int8_t> codes) {
    GroupWord w;
    w.letters.reserve(codes.size());
    for (auto c : codes) w.letters.push_back(code_letter(c, lat.n_gens()));
    return w;
}

void for_each_reduced_word(const LatticeRep& lat, int maxlen, const EnumOptions& opts,
                           const std::function<void(std::size_t, const WordView&)>& visit) {
    if (maxlen < 1) throw invalid_input("maxlen must be >= 1");
    const Alphabet alpha(lat);
    const int k = lat.n_letters();
    const int ng = lat.n_gens();
    Budget budget(opts.max_words);
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t task) {
        LocalCounter counter(budget);
        std::vector<std::int8_t> codes(static_cast<std::size_t>(maxlen));
        std::vector<Mat2> mats(static_cast<std::size_t>(maxlen) + 1);
        std::vector<int> hom(static_cast<std::size_t>(ng), 0);
        std::function<void(int)> node = [&](int t) {
            counter.tick();
            const std::span<const std::int8_t> w(codes.data(), static_cast<std::size_t>(t));
            if (!(opts.dehn_filter && alpha.relator_majority(w, false)))
                visit(task, WordView{w, mats[static_cast<std::size_t>(t)], hom});
            if (t == maxlen) return;
            const int forbidden = alpha.inv[static_cast<std::size_t>(codes[static_cast<std::size_t>(t - 1)])];
            for (int j = 0; j < k; ++j) {
                if (j == forbidden) continue;
                codes[static_cast<std::size_t>(t)] = static_cast<std::int8_t>(j);
                mats[static_cast<std::size_t>(t) + 1] = mats[static_cast<std::size_t>(t)] * alpha.mats[static_cast<std::size_t>(j)];
                int& h = hom[static_cast<std::size_t>(j % ng)];
                h += j < ng ? 1 : -1;
                node(t + 1);
                h -= j < ng ? 1 : -1;
            }
        };
        const int j = static_cast<int>(task);
        codes[0] = static_cast<std::int8_t>(j);
        mats[0] = Mat2::identity();
        mats[1] = alpha.mats[task];
        hom[static_cast<std::size_t>(j % ng)] += j < ng ? 1 : -1;
        node(1);
        counter.flush();
    });
}

void for_each_cyclic_class(const LatticeRep& lat, int maxlen, const EnumOptions& opts,
                           const std::function<void(std::size_t, const WordView&)>& visit) {
    if (maxlen < 1) throw invalid_input("maxlen must be >= 1");
    const Alphabet alpha(lat);
    const int k = lat.n_letters();
    const int ng = lat.n_gens();
    Budget budget(opts.max_words);
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t task) {
        LocalCounter counter(budget);
        std::vector<std::int8_t> codes(static_cast<std::size_t>(maxlen));
        std::vector<Mat2> mats(static_cast<std::size_t>(maxlen) + 1);
        std::vector<int> hom(static_cast<std::size_t>(ng), 0);
        std::vector<std::int8_t> inv_word;
        // Prenecklace recursion: codes[0, t) has Lyndon period p.
        std::function<void(int, int)> node = [&](int t, int p) {
            counter.tick();
            const std::span<const std::int8_t> w(codes.data(), static_cast<std::size_t>(t));
            const bool cyclic_ok = t == 1 || codes[static_cast<std::size_t>(t - 1)] != alpha.inv[static_cast<std::size_t>(codes[0])];
            if (t % p == 0 && cyclic_ok) {
                bool keep = !(opts.dehn_filter && alpha.relator_majority(w, true));
                if (keep && opts.dedup_inverse) {
                    inv_word.assign(w.rbegin(), w.rend());
                    for (auto& c : inv_word) c = static_cast<std::int8_t>(alpha.inv[static_cast<std::size_t>(c)]);
                    const auto canon = least_rotation(inv_word);
                    keep = !std::lexicographical_compare(canon.begin(), canon.end(), w.begin(), w.end());
                }
                if (keep) visit(task, WordView{w, mats[static_cast<std::size_t>(t)], hom});
            }
            if (t == maxlen) return;
            const int lo = codes[static_cast<std::size_t>(t - p)];
            const int forbidden = alpha.inv[static_cast<std::size_t>(codes[static_cast<std::size_t>(t - 1)])];
            for (int j = lo; j < k; ++j) {
                if (j == forbidden) continue;
                codes[static_cast<std::size_t>(t)] = static_cast<std::int8_t>(j);
                mats[static_cast<std::size_t>(t) + 1] = mats[static_cast<std::size_t>(t)] * alpha.mats[static_cast<std::size_t>(j)];
                int& h = hom[static_cast<std::size_t>(j % ng)];
                h += j < ng ? 1 : -1;
                node(t + 1, j == lo ? p : t + 1);
                h -= j < ng ? 1 : -1;
            }
        };
        const int j = static_cast<int>(task);
        codes[0] = static_cast<std::int8_t>(j);
        mats[0] = Mat2::identity();
        mats[1] = alpha.mats[task];
        hom[static_cast<std::size_t>(j % ng)] += j < ng ? 1 : -1;
        node(1, 1);
        counter.flush();
    });
}

namespace {

ConjClass make_class(const LatticeRep& lat, const WordView& v) {
    ConjClass c;
    c.rep = word_from_codes(lat, v.codes);
    c.trace = std::abs(v.matrix.trace());
    c.length = translation_length(v.matrix);
    c.homology.assign(v.homology.begin(), v.homology.end());
    return c;
}

bool shortlex_less(const GroupWord& a, const GroupWord& b, int n_gens) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int x = letter_code(a.letters[i], n_gens), y = letter_code(b.letters[i], n_gens);
        if (x != y) return x < y;
    }
    return false;
}

}  // namespace

Enumeration enumerate_words(const LatticeRep& lat, int maxlen, EnumMode mode, const EnumOptions& opts) {
    const std::size_t tasks = static_cast<std::size_t>(lat.n_letters());
    Enumeration out;
    if (mode == EnumMode::AllReduced) {
        std::vector<std::vector<GroupWord>> per(tasks);
        for_each_reduced_word(lat, maxlen, opts, [&](std::size_t t, const WordView& v) { per[t].push_back(word_from_codes(lat, v.codes)); });
        for (auto& p : per) out.words.insert(out.words.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
        std::sort(out.words.begin(), out.words.end(), [&](const GroupWord& a, const GroupWord& b) { return shortlex_less(a, b, lat.n_gens()); });
        out.count = out.words.size();
    } else {
        std::vector<std::vector<ConjClass>> per(tasks);
        for_each_cyclic_class(lat, maxlen, opts, [&](std::size_t t, const WordView& v) { per[t].push_back(make_class(lat, v)); });
        for (auto& p : per) out.classes.insert(out.classes.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
        std::sort(out.classes.begin(), out.classes.end(),
                  [&](const ConjClass& a, const ConjClass& b) { return shortlex_less(a.rep, b.rep, lat.n_gens()); });
        out.count = out.classes.size();
    }
    return out;
}

std::vector<ConjClass> length_spectrum(const LatticeRep& lat, int maxlen, const EnumOptions& opts) {
    Enumeration e = enumerate_words(lat, maxlen, EnumMode::ConjClasses, opts);
    std::map<std::pair<long long, std::vector<int>>, std::vector<std::size_t>> buckets;
    std::vector<ConjClass> kept;
    for (auto& c : e.classes) {
        if (c.length <= 0.0) continue;
        auto& bucket = buckets[{std::llround(c.trace * 1e8), c.homology}];
        bool merged = false;
        for (std::size_t idx : bucket) {
            const Mat2 target = eval_matrix(lat, kept[idx].rep);
            for (std::size_t s = 0; s < c.rep.size() && !merged; ++s)
                merged = psl_distance(eval_matrix(lat, rotate(c.rep, s)), target) < 1e-6;
            if (merged) break;
        }
        if (merged) continue;
        bucket.push_back(kept.size());
        kept.push_back(std::move(c));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const ConjClass& a, const ConjClass& b) { return a.length < b.length; });
    return kept;
}

std::string spectrum_csv(const LatticeRep& lat, const std::vector<ConjClass>& spectrum) {
    std::ostringstream os;
    os.precision(17);
    os << "word,length";
    for (int i = 1; i <= lat.n_gens(); ++i) os << ",h" << i;
    os << ",tau,Ju,Js\n";
    for (const auto& c : spectrum) {
        os << to_string(c.rep) << ',' << c.length;
        for (int h : c.homology) os << ',' << h;
        os << ',' << c.tau() << ',' << c.ju() << ',' << c.js() << '\n';
    }
    return os.str();
}

int integer_rank(const std::vector<std::vector<int>>& vectors, int dim) {
    if (vectors.empty()) return 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors.size()), dim);
    for (std::size_t i = 0; i < vectors.size(); ++i)
        for (int j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = vectors[i][static_cast<std::size_t>(j)];
    return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank());
}

bool LatticeAudit::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

LatticeAudit audit_lattice(const LatticeRep& lat, int maxlen, const EnumOptions& opts) {
    constexpr double kNearCentral = 1e-6;
    LatticeAudit rep;
    rep.maxlen = maxlen;
    const std::size_t tasks = static_cast<std::size_t>(lat.n_letters());

    struct Acc {
        std::uint64_t words = 0, parabolic = 0, elliptic = 0, identity = 0, unexplained = 0, centralizer = 0;
        double min_disp = INFINITY;
    };
    std::vector<Acc> acc(tasks);
    const Mat2 t1 = lat.gens.at(0).matrix(), t2 = lat.gens.at(1).matrix();
    for_each_reduced_word(lat, maxlen, opts, [&](std::size_t task, const WordView& v) {
        Acc& a = acc[task];
        ++a.words;
        const Mat2& m = v.matrix;
        const double disp = psl_distance(m, Mat2::identity());
        if (disp <= kNearCentral) {
            if (dehn_reduce(word_from_codes(lat, v.codes), lat.relator).empty()) {
                ++a.identity;
                return;
            }
            ++a.unexplained;
        }
        a.min_disp = std::min(a.min_disp, disp);
        switch (classify(m)) {
            case ElementClass::Parabolic: ++a.parabolic; break;
            case ElementClass::Elliptic: ++a.elliptic; break;
            default: break;
        }
        const double scale = op_norm(m);
        if (psl_distance(m * t1, t1 * m) <= 1e-9 * scale * op_norm(t1) && psl_distance(m * t2, t2 * m) <= 1e-9 * scale * op_norm(t2))
            ++a.centralizer;
    });
    rep.min_displacement = INFINITY;
    for (const auto& a : acc) {
        rep.words_checked += a.words;
        rep.parabolic_count += a.parabolic;
        rep.elliptic_count += a.elliptic;
        rep.identity_words += a.identity;
        rep.unexplained_central += a.unexplained;
        rep.centralizer_hits += a.centralizer;
        rep.min_displacement = std::min(rep.min_displacement, a.min_disp);
    }

    const CoverElement rel = eval(lat, lat.relator);
    rep.relator_residual = psl_distance(rel.matrix(), Mat2::identity());
    rep.relator_winding = rel.winding();

    std::vector<std::vector<std::vector<int>>> hom(tasks);
    for_each_cyclic_class(lat, maxlen, opts, [&](std::size_t task, const WordView& v) {
        if (classify(v.matrix) == ElementClass::Hyperbolic) hom[task].emplace_back(v.homology.begin(), v.homology.end());
    });
    std::vector<std::vector<int>> all;
    for (auto& h : hom) all.insert(all.end(), h.begin(), h.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    rep.homology_rank = integer_rank(all, lat.n_gens());

    const long euler = 2L * lat.genus - 2;
    auto add = [&](std::string name, bool pass, std::string detail) { rep.checks.push_back({std::move(name), pass, std::move(detail)}); };
    add("no-parabolic", rep.parabolic_count == 0, std::to_string(rep.parabolic_count) + " parabolic words");
    add("no-elliptic", rep.elliptic_count == 0, std::to_string(rep.elliptic_count) + " elliptic words");
    add("relator-central", rep.relator_residual <= lat.tol && std::abs(rep.relator_winding) == euler,
        "residual " + std::to_string(rep.relator_residual) + ", winding " + std::to_string(rep.relator_winding));
    add("homology-rank", rep.homology_rank == lat.n_gens(), "rank " + std::to_string(rep.homology_rank));
    add("discreteness", rep.unexplained_central == 0 && rep.min_displacement > kNearCentral,
        "min displacement " + std::to_string(rep.min_displacement));
    add("centralizer-trivial", rep.centralizer_hits == 0, std::to_string(rep.centralizer_hits) + " commuting words");
    return rep;
}

}  // namespace hyperdyn
