#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperdyn/cover.hpp"
#include "hyperdyn/word.hpp"

namespace hyperdyn {

/// Cocompact surface group given by generator matrices and one relator.
struct LatticeRep {
    int genus = 2;
    std::vector<CoverElement> gens;  // 2g generators, winding-0 representatives
    GroupWord relator;
    double tol = 1e-9;
    std::string convention;  // stamped into every output derived from this lattice

    int n_gens() const { return static_cast<int>(gens.size()); }
    // Letter codes 0..2n-1: code i < n is generator i+1, code n+i its inverse.
    int n_letters() const { return 2 * n_gens(); }
};

/// Genus-2 regular octagon group. B is the translation X^{L_B} along the
/// imaginary axis with cosh(L_B/2) = 1 + sqrt(2); T_k is B conjugated by the
/// hyperbolic rotation by k pi/4 about i (the matrix rotation by k pi/8).
/// The relator is the first candidate side-pairing word that closes to
/// +-I. Throws "construction-failed" when none does.
LatticeRep octagon_lattice();

// Candidate relators tried by octagon_lattice(), in order.
std::vector<GroupWord> octagon_relator_candidates();

CoverElement eval(const LatticeRep& lat, const GroupWord& w);
// Plain matrix product without renormalization (enumeration hot path).
Mat2 eval_matrix(const LatticeRep& lat, const GroupWord& w);

struct EnumOptions {
    std::uint64_t max_words = 200'000'000;  // node budget
    bool dedup_inverse = false;              // conj_classes: identify w with w^-1
    bool dehn_filter = false;                // drop words holding > half a relator
};

// Number of freely reduced words of length 1..maxlen over n_letters letters.
std::uint64_t count_reduced_words(int n_letters, int maxlen);

/// Visitor payload. `codes` are letter codes (see LatticeRep); `homology`
/// has one entry per generator.
struct WordView {
    std::span<const std::int8_t> codes;
    const Mat2& matrix;
    std::span<const int> homology;
};

GroupWord word_from_codes(const LatticeRep& lat, std::span<const std::int8_t> codes);

/// Depth-first visit of every freely reduced word of length 1..maxlen.
/// Work is split into one task per first letter and run on the worker
/// pool; `visit(task, view)` receives the task index in [0, n_letters) so
/// callers can accumulate per task and merge in task order.
/// Throws resource-limit when the word count exceeds opts.max_words.
void for_each_reduced_word(const LatticeRep& lat, int maxlen, const EnumOptions& opts,
                           const std::function<void(std::size_t, const WordView&)>& visit);

/// Visits one representative per cyclic class of nontrivial cyclically
/// reduced words of length 1..maxlen: the lexicographically least
/// rotation (necklace), generated by the prenecklace recursion with free
/// reduction pruning. Same task contract as for_each_reduced_word.
void for_each_cyclic_class(const LatticeRep& lat, int maxlen, const EnumOptions& opts,
                           const std::function<void(std::size_t, const WordView&)>& visit);

/// Conjugacy class of a hyperbolic element: a periodic orbit of the
/// homogeneous flow with tau = J^u = -J^s = translation length.
struct ConjClass {
    GroupWord rep;  // cyclically reduced
    double length = 0.0;
    double trace = 0.0;  // |tr|
    std::vector<int> homology;
    double tau() const { return length; }
    double ju() const { return length; }
    double js() const { return -length; }
};

enum class EnumMode { AllReduced, ConjClasses };

struct Enumeration {
    std::vector<GroupWord> words;     // AllReduced
    std::vector<ConjClass> classes;   // ConjClasses (hyperbolic and not)
    std::uint64_t count = 0;
};

// Materialized enumeration in deterministic order: by word length, then
// by letter codes.
Enumeration enumerate_words(const LatticeRep& lat, int maxlen, EnumMode mode, const EnumOptions& opts = {});

/// Hyperbolic conjugacy classes up to word length maxlen, sorted by length.
/// Classes are cyclic words; two cyclic words with equal rounded trace
/// (1e-8) and homology are merged when some rotation of one evaluates
/// within 1e-6 of the other in PSL(2,R).
std::vector<ConjClass> length_spectrum(const LatticeRep& lat, int maxlen, const EnumOptions& opts = {});

// CSV with header word,length,h1,...,h2g,tau,Ju,Js.
std::string spectrum_csv(const LatticeRep& lat, const std::vector<ConjClass>& spectrum);

struct AuditCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct LatticeAudit {
    int maxlen = 0;
    std::uint64_t words_checked = 0;
    std::uint64_t parabolic_count = 0;
    std::uint64_t elliptic_count = 0;
    std::uint64_t identity_words = 0;       // near +-I and trivial by Dehn reduction
    std::uint64_t unexplained_central = 0;  // near +-I but not trivial in the group
    double relator_residual = 0.0;          // PSL distance of eval(relator) from I
    long relator_winding = 0;
    int homology_rank = 0;
    double min_displacement = 0.0;  // min over nontrivial words of dist(theta(w), +-I)
    std::uint64_t centralizer_hits = 0;  // nontrivial words commuting with T_1 and T_2
    std::vector<AuditCheck> checks;
    bool all_pass() const;
};

LatticeAudit audit_lattice(const LatticeRep& lat, int maxlen, const EnumOptions& opts = {});

// Rank of a set of integer vectors (Eigen full-pivot LU).
int integer_rank(const std::vector<std::vector<int>>& vectors, int dim);

}  // namespace hyperdyn
