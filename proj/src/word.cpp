#include "hyperdyn/word.hpp"

#include <charconv>
#include <cstdlib>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

GroupWord free_reduce(const GroupWord& w) {
    GroupWord out;
    out.letters.reserve(w.letters.size());
    for (int l : w.letters) {
        if (l == 0) throw invalid_input("word letters must be nonzero generator indices");
        if (!out.letters.empty() && out.letters.back() == -l)
            out.letters.pop_back();
        else
            out.letters.push_back(l);
    }
    return out;
}

bool is_freely_reduced(const GroupWord& w) {
    for (std::size_t i = 1; i < w.letters.size(); ++i)
        if (w.letters[i] == -w.letters[i - 1]) return false;
    return true;
}

GroupWord cyclic_reduce(const GroupWord& w) {
    GroupWord r = free_reduce(w);
    std::size_t lo = 0, hi = r.letters.size();
    while (hi - lo >= 2 && r.letters[lo] == -r.letters[hi - 1]) {
        ++lo;
        --hi;
    }
    return {std::vector<int>(r.letters.begin() + static_cast<long>(lo), r.letters.begin() + static_cast<long>(hi))};
}

bool is_cyclically_reduced(const GroupWord& w) {
    return is_freely_reduced(w) && (w.letters.size() < 2 || w.letters.front() != -w.letters.back());
}

GroupWord inverse(const GroupWord& w) {
    GroupWord r;
    r.letters.assign(w.letters.rbegin(), w.letters.rend());
    for (int& l : r.letters) l = -l;
    return r;
}

GroupWord concat(const GroupWord& u, const GroupWord& v) {
    GroupWord r = u;
    r.letters.insert(r.letters.end(), v.letters.begin(), v.letters.end());
    return r;
}

GroupWord rotate(const GroupWord& w, std::size_t shift) {
    GroupWord r;
    const std::size_t n = w.letters.size();
    r.letters.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.letters[i] = w.letters[(i + shift) % n];
    return r;
}

GroupWord commutator_word(const GroupWord& u, const GroupWord& v) {
    return concat(concat(inverse(u), inverse(v)), concat(u, v));
}

std::vector<int> abelianize(const GroupWord& w, int n_gens) {
    std::vector<int> h(static_cast<std::size_t>(n_gens), 0);
    for (int l : w.letters) {
        const int g = std::abs(l);
        if (g < 1 || g > n_gens) throw invalid_input("letter out of range for abelianization");
        h[static_cast<std::size_t>(g - 1)] += l > 0 ? 1 : -1;
    }
    return h;
}

std::string to_string(const GroupWord& w) {
    if (w.letters.empty()) return "e";
    std::string s;
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w.letters[i]);
    }
    return s;
}

GroupWord parse_word(std::string_view text) {
    GroupWord w;
    if (text == "e" || text.empty()) return w;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        if (dot == std::string_view::npos) dot = text.size();
        const std::string_view tok = text.substr(pos, dot - pos);
        int v = 0;
        const char* first = tok.data();
        if (!tok.empty() && tok.front() == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
            throw invalid_input("malformed word token '" + std::string(tok) + "'");
        w.letters.push_back(v);
        pos = dot + 1;
    }
    return w;
}

namespace {

std::vector<GroupWord> relator_rotations(const GroupWord& relator) {
    std::vector<GroupWord> rots;
    const GroupWord inv = inverse(relator);
    for (std::size_t s = 0; s < relator.size(); ++s) {
        rots.push_back(rotate(relator, s));
        rots.push_back(rotate(inv, s));
    }
    return rots;
}

}  // namespace

GroupWord dehn_reduce(const GroupWord& w, const GroupWord& relator) {
    const std::size_t n = relator.size();
    if (n == 0) return free_reduce(w);
    const auto rots = relator_rotations(relator);
    const std::size_t min_len = n / 2 + 1;
    GroupWord cur = free_reduce(w);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < cur.size() && !changed; ++i) {
            for (const auto& rho : rots) {
                std::size_t len = 0;
                while (len < n && i + len < cur.size() && cur.letters[i + len] == rho.letters[len]) ++len;
                if (len < min_len) continue;
                // cur[i, i+len) = rho[0, len) equals inverse(rho[len, n)).
                GroupWord tail{std::vector<int>(rho.letters.begin() + static_cast<long>(len), rho.letters.end())};
                GroupWord repl = inverse(tail);
                GroupWord next;
                next.letters.assign(cur.letters.begin(), cur.letters.begin() + static_cast<long>(i));
                next.letters.insert(next.letters.end(), repl.letters.begin(), repl.letters.end());
                next.letters.insert(next.letters.end(), cur.letters.begin() + static_cast<long>(i + len), cur.letters.end());
                cur = free_reduce(next);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

bool has_cyclic_relator_majority(const GroupWord& w, const GroupWord& relator) {
    const std::size_t n = relator.size(), m = w.size();
    if (n == 0 || m == 0) return false;
    const auto rots = relator_rotations(relator);
    const std::size_t min_len = n / 2 + 1;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& rho : rots) {
            std::size_t len = 0;
            while (len < n && len < m && w.letters[(i + len) % m] == rho.letters[len]) ++len;
            if (len >= min_len) return true;
        }
    }
    return false;
}

}  // namespace hyperdyn
