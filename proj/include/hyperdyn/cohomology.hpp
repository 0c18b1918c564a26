#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperdyn/lattice.hpp"

namespace hyperdyn {

/// Real cohomology class on M_Gamma, paired with group elements through
/// abelianization: a(gamma) = <v, h(gamma)>.
struct CohClass {
    std::vector<double> v;

    static CohClass zero(int dim) { return {std::vector<double>(static_cast<std::size_t>(dim), 0.0)}; }
    static CohClass basis(int dim, int i);
    int dim() const { return static_cast<int>(v.size()); }
};

CohClass operator+(const CohClass& a, const CohClass& b);
CohClass operator*(double t, const CohClass& a);

double evaluate(const CohClass& a, const GroupWord& w);
double evaluate(const CohClass& a, std::span<const int> homology);

/// Hyperbolic conjugacy classes up to word length maxlen, reduced to what
/// the ratio |a(gamma)|/L(gamma) can see: for each (word length,
/// homology) the minimal translation length and a witness word.
struct ClassSummary {
    struct Entry {
        int word_len = 0;
        std::vector<int> homology;
        double length = 0.0;
        double trace = 0.0;
        GroupWord witness;
    };
    int maxlen = 0;
    int dim = 0;
    std::uint64_t classes = 0;  // hyperbolic cyclic words visited
    double min_length = 0.0;
    std::vector<Entry> entries;  // sorted by (word_len, homology)
    std::string convention;
};

ClassSummary summarize_classes(const LatticeRep& lat, int maxlen, const EnumOptions& opts = {});

// Every entry has a partner with negated homology, equal word length and
// equal minimal length.
bool inverse_closed(const ClassSummary& s);

struct DeltaEstimate {
    int maxlen = 0;
    double sup = 0.0;
    ConjClass witness;  // shortest class within 1e-12 of sup; empty when sup == 0
    std::vector<std::pair<int, double>> history;  // (N, S_N), N = 1..maxlen
};

/// S_N(a) = max |a(gamma)|/L(gamma) over hyperbolic classes of word length
/// <= N. A lower bound for the sup over all of Gamma.
DeltaEstimate delta_sup(const ClassSummary& s, const CohClass& a);
DeltaEstimate delta_sup(const LatticeRep& lat, const CohClass& a, int maxlen, const EnumOptions& opts = {});

// S_maxlen only, no witness or history (hot loop for slices and sweeps).
double delta_value(const ClassSummary& s, const CohClass& a);

/// Membership is one-sided: CertifiedOut when S_N >= 1, Plausible when
/// S_N < 1 - margin, Borderline otherwise.
enum class DeltaStatus { CertifiedOut, Plausible, Borderline };
std::string to_string(DeltaStatus s);
DeltaStatus in_delta(double s_n, double margin);

struct SlicePoint {
    double s = 0.0, t = 0.0, value = 0.0;
    DeltaStatus status = DeltaStatus::Plausible;
};

/// S_N on the (2 grid + 1)^2 lattice origin + s dir1 + t dir2 with
/// s, t in [-extent, extent], row-major in s then t.
std::vector<SlicePoint> delta_slice(const ClassSummary& s, const CohClass& origin, const CohClass& dir1,
                                   const CohClass& dir2, int grid, double extent, double margin);
std::string slice_csv(const std::vector<SlicePoint>& pts);

/// Discrete midpoint convexity of {S_N < level} on a slice: whenever two
/// grid points lie in the set and their midpoint is a grid point, so does
/// the midpoint. Returns the number of violations.
std::uint64_t slice_midpoint_violations(const std::vector<SlicePoint>& pts, int grid, double level);

// tau_a = L(gamma) + a(gamma).
double period_shift(const CohClass& a, const ConjClass& c);

struct GammaAViolator {
    GroupWord word;
    double length = 0.0;
    double a_value = 0.0;
    double min_displacement = 0.0;  // min over P in V of d(gamma P X^a, V)
};

struct GammaAAudit {
    double s_n = 0.0;
    double epsilon = 0.0;     // 1 - S_N
    double min_margin = 0.0;  // min over classes of L - |a|
    double generator_margin = 0.0;  // L(T_1) - |a(T_1)|
    std::uint64_t classes_checked = 0;
    std::uint64_t fixed_point_classes = 0;  // L = |a| and some sample fixed
    double k0 = 0.0;
    double violator_bound = 0.0;  // 2 K0 / (1 - S_N)
    std::vector<GammaAViolator> violators;  // 2 K0 + |a| >= L
    bool violators_bounded = true;          // every violator has L <= violator_bound
    double min_violator_displacement = 0.0;
    std::vector<AuditCheck> checks;
    bool all_pass() const;
};

/// Freeness and proper-discontinuity evidence for the deformed action
/// (gamma, P) -> gamma P X^{a(gamma)}. The distance on the group is
/// d(P, Q) = log ||P^-1 Q||; V holds n_samples points X^t U^y S^x with
/// t, x, y uniform in [-1, 1] drawn from mt19937_64(seed).
/// Throws invalid-input when a is certified outside Delta.
GammaAAudit gamma_a_audit(const LatticeRep& lat, const CohClass& a, int maxlen, int n_samples, std::uint64_t seed,
                          const EnumOptions& opts = {});

}  // namespace hyperdyn
