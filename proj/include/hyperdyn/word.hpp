#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hyperdyn {

/// Word over generators 1..n and their inverses, stored as signed
/// generator indices (+-1 .. +-n).
struct GroupWord {
    std::vector<int> letters;

    bool empty() const { return letters.empty(); }
    std::size_t size() const { return letters.size(); }
    friend bool operator==(const GroupWord&, const GroupWord&) = default;
    friend auto operator<=>(const GroupWord&, const GroupWord&) = default;
};

GroupWord free_reduce(const GroupWord& w);
bool is_freely_reduced(const GroupWord& w);
// Free reduction followed by stripping inverse pairs at the two ends.
GroupWord cyclic_reduce(const GroupWord& w);
bool is_cyclically_reduced(const GroupWord& w);

GroupWord inverse(const GroupWord& w);
GroupWord concat(const GroupWord& u, const GroupWord& v);
GroupWord rotate(const GroupWord& w, std::size_t shift);
// Commutator word u^-1 v^-1 u v.
GroupWord commutator_word(const GroupWord& u, const GroupWord& v);

// Exponent-sum vector in Z^n_gens.
std::vector<int> abelianize(const GroupWord& w, int n_gens);

// "1.-2.3"; the empty word prints as "e".
std::string to_string(const GroupWord& w);
GroupWord parse_word(std::string_view text);

/// Dehn's algorithm for a single cyclically reduced relator: repeatedly
/// replaces any subword that is more than half of a cyclic permutation of
/// the relator (or its inverse) by the inverse of the complementary part.
/// Solves the word problem for surface groups of genus >= 2.
GroupWord dehn_reduce(const GroupWord& w, const GroupWord& relator);

// True when some cyclic rotation of w contains more than half of a
// cyclic permutation of the relator or its inverse.
bool has_cyclic_relator_majority(const GroupWord& w, const GroupWord& relator);

}  // namespace hyperdyn
