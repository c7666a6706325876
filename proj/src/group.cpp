#include "group.hpp"

#include <algorithm>
#include <numeric>

#include "util.hpp"

namespace morphbb {

static const char* kFactorSymbols[] = {"x", "y", "z", "w", "v"};
static constexpr std::size_t kMaxFactors = 5;

Group make_group(const std::vector<int>& orders) {
    if (orders.empty()) throw invalid_group_error("group needs at least one cyclic factor");
    for (int d : orders)
        if (d < 1) throw invalid_group_error("cyclic factor order must be >= 1");
    if (orders.size() > kMaxFactors) throw invalid_group_error("at most 5 cyclic factors supported");
    Group g;
    g.orders = orders;
    g.order = 1;
    for (int d : orders) g.order *= static_cast<std::size_t>(d);

    std::size_t k = orders.size();
    std::vector<std::size_t> stride(k, 1);
    for (std::size_t i = k; i-- > 1;) stride[i - 1] = stride[i] * static_cast<std::size_t>(orders[i]);

    g.mul_table.resize(g.order * g.order);
    g.inv_table.resize(g.order);
    std::vector<int> ea(k), eb(k);
    for (uint32_t a = 0; a < g.order; a++) {
        std::size_t ra = a;
        for (std::size_t i = 0; i < k; i++) { ea[i] = static_cast<int>(ra / stride[i]); ra %= stride[i]; }
        uint32_t inv = 0;
        for (std::size_t i = 0; i < k; i++)
            inv += static_cast<uint32_t>(((orders[i] - ea[i]) % orders[i]) * static_cast<int>(stride[i]));
        g.inv_table[a] = inv;
        for (uint32_t b = 0; b < g.order; b++) {
            std::size_t rb = b;
            for (std::size_t i = 0; i < k; i++) { eb[i] = static_cast<int>(rb / stride[i]); rb %= stride[i]; }
            uint32_t c = 0;
            for (std::size_t i = 0; i < k; i++)
                c += static_cast<uint32_t>(((ea[i] + eb[i]) % orders[i]) * static_cast<int>(stride[i]));
            g.mul_table[a * g.order + b] = c;
        }
    }
    return g;
}

uint32_t Group::pow(uint32_t a, long long e) const {
    uint32_t base = a;
    unsigned long long n;
    if (e < 0) {
        base = inv(a);
        n = static_cast<unsigned long long>(-e);
    } else {
        n = static_cast<unsigned long long>(e);
    }
    uint32_t result = 0;
    while (n > 0) {
        if (n & 1) result = mul(result, base);
        base = mul(base, base);
        n >>= 1;
    }
    return result;
}

int Group::element_order(uint32_t a) const {
    uint32_t x = a;
    int t = 1;
    while (x != 0) { x = mul(x, a); t++; }
    return t;
}

std::vector<int> Group::exponents_of(uint32_t idx) const {
    std::size_t k = orders.size();
    std::vector<int> e(k);
    std::size_t r = idx;
    for (std::size_t i = k; i-- > 0;) {
        e[i] = static_cast<int>(r % static_cast<std::size_t>(orders[i]));
        r /= static_cast<std::size_t>(orders[i]);
    }
    return e;
}

uint32_t Group::index_of(const std::vector<int>& exps) const {
    if (exps.size() != orders.size())
        throw invalid_element_error("element arity does not match group factor count");
    uint32_t idx = 0;
    for (std::size_t i = 0; i < orders.size(); i++) {
        int e = exps[i] % orders[i];
        if (e < 0) e += orders[i];
        idx = idx * static_cast<uint32_t>(orders[i]) + static_cast<uint32_t>(e);
    }
    return idx;
}

std::string Group::element_name(uint32_t idx) const {
    std::vector<int> e = exponents_of(idx);
    std::string out;
    for (std::size_t i = 0; i < e.size(); i++) {
        if (e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += kFactorSymbols[i];
        if (e[i] != 1) out += "^" + std::to_string(e[i]);
    }
    return out.empty() ? "1" : out;
}

uint32_t Group::parse_element(const std::string& text) const {
    std::vector<int> exps(orders.size(), 0);
    std::size_t pos = 0;
    auto skip_ws = [&]() { while (pos < text.size() && text[pos] == ' ') pos++; };
    skip_ws();
    if (pos < text.size() && text[pos] == '1') {
        pos++;
        skip_ws();
        if (pos != text.size()) throw parse_error("bad element '" + text + "'");
        return 0;
    }
    bool first = true;
    while (pos < text.size()) {
        skip_ws();
        if (!first) {
            if (pos >= text.size() || text[pos] != '*') throw parse_error("bad element '" + text + "'");
            pos++;
            skip_ws();
        }
        first = false;
        std::size_t factor = kMaxFactors;
        for (std::size_t i = 0; i < orders.size() && i < kMaxFactors; i++) {
            if (pos < text.size() && text.compare(pos, 1, kFactorSymbols[i]) == 0) { factor = i; break; }
        }
        if (factor == kMaxFactors) throw parse_error("unknown factor symbol in '" + text + "'");
        pos++;
        long long e = 1;
        if (pos < text.size() && text[pos] == '^') {
            pos++;
            bool neg = false;
            if (pos < text.size() && text[pos] == '-') { neg = true; pos++; }
            if (pos >= text.size() || !isdigit(static_cast<unsigned char>(text[pos])))
                throw parse_error("bad exponent in '" + text + "'");
            e = 0;
            while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos])))
                e = e * 10 + (text[pos++] - '0');
            if (neg) e = -e;
        }
        exps[factor] = static_cast<int>((exps[factor] + e) % orders[factor]);
        skip_ws();
    }
    return index_of(exps);
}

GroupSubset Group::subset_of(const std::vector<uint32_t>& elems) const {
    GroupSubset s(order);
    for (uint32_t e : elems) {
        if (e >= order) throw invalid_element_error("element index out of range");
        s.set(e);
    }
    return s;
}

GroupSubset Group::parse_subset(const std::vector<std::string>& monomials) const {
    GroupSubset s(order);
    for (const auto& m : monomials) s.set(parse_element(m));
    return s;
}

std::vector<std::string> Group::subset_names(const GroupSubset& s) const {
    std::vector<std::string> out;
    for (std::size_t e : s.ones()) out.push_back(element_name(static_cast<uint32_t>(e)));
    return out;
}

GroupSubset Group::shift(const GroupSubset& s, uint32_t g) const {
    GroupSubset out(order);
    for (std::size_t e : s.ones()) out.set(mul(static_cast<uint32_t>(e), g));
    return out;
}

GroupSubset Group::inverse_set(const GroupSubset& s) const {
    GroupSubset out(order);
    for (std::size_t e : s.ones()) out.set(inv(static_cast<uint32_t>(e)));
    return out;
}

GroupSubset Group::algebra_mul(const GroupSubset& s, const GroupSubset& t) const {
    GroupSubset out(order);
    for (std::size_t a : s.ones())
        for (std::size_t b : t.ones())
            out.flip(mul(static_cast<uint32_t>(a), static_cast<uint32_t>(b)));
    return out;
}

bool Homomorphism::eval(const Group& g, uint32_t idx) const {
    std::vector<int> e = g.exponents_of(idx);
    int acc = 0;
    for (std::size_t i = 0; i < e.size(); i++)
        if (maps_to_u[i]) acc ^= e[i] & 1;
    return acc != 0;
}

GroupSubset Homomorphism::kernel(const Group& g) const {
    GroupSubset k(g.order);
    for (uint32_t i = 0; i < g.order; i++)
        if (!eval(g, i)) k.set(i);
    return k;
}

GroupSubset Homomorphism::complement(const Group& g) const {
    GroupSubset k = kernel(g);
    GroupSubset c(g.order);
    for (uint32_t i = 0; i < g.order; i++)
        if (!k.get(i)) c.set(i);
    return c;
}

std::string Homomorphism::name(const Group& g) const {
    std::string s = "f_";
    for (std::size_t i = 0; i < maps_to_u.size(); i++)
        if (maps_to_u[i]) s += kFactorSymbols[i];
    (void)g;
    return s;
}

std::vector<Homomorphism> find_homomorphisms(const Group& g) {
    std::size_t k = g.orders.size();
    std::vector<Homomorphism> out;
    for (uint32_t mask = 1; mask < (1u << k); mask++) {
        bool ok = true;
        Homomorphism h;
        h.maps_to_u.resize(k, false);
        for (std::size_t i = 0; i < k; i++) {
            if (!(mask & (1u << i))) continue;
            if (g.orders[i] % 2 != 0) { ok = false; break; }  // odd-order generator forced to 1
            h.maps_to_u[i] = true;
        }
        if (ok) out.push_back(h);
    }
    return out;
}

SubgroupDecomposition decompose_subgroup(const Group& g, const GroupSubset& members) {
    std::vector<uint32_t> elems;
    for (std::size_t e : members.ones()) elems.push_back(static_cast<uint32_t>(e));
    if (elems.empty() || elems[0] != 0)
        throw invalid_group_error("subgroup must contain the identity");
    std::size_t target = elems.size();

    // Greedy basis: repeatedly adjoin the element with the largest order in the
    // quotient by the span so far, adjusted so its true order equals its
    // quotient order (which makes the span an internal direct product).
    std::vector<bool> in_span(g.order, false);
    std::vector<uint32_t> span = {0};
    in_span[0] = true;
    std::vector<uint32_t> basis;
    std::vector<int> basis_orders;

    auto quotient_order = [&](uint32_t a) {
        uint32_t x = a;
        int t = 1;
        while (!in_span[x]) { x = g.mul(x, a); t++; }
        return t;
    };

    while (span.size() < target) {
        uint32_t best = 0;
        int best_q = 0;
        for (uint32_t e : elems) {
            if (in_span[e]) continue;
            int q = quotient_order(e);
            if (q > best_q) { best_q = q; best = e; }
        }
        // adjust by a span element so the representative has exact order best_q
        uint32_t chosen = g.order;  // sentinel
        for (uint32_t h : span) {
            uint32_t cand = g.mul(best, h);
            if (g.pow(cand, best_q) == 0 && quotient_order(cand) == best_q) { chosen = cand; break; }
        }
        if (chosen == g.order)
            throw construction_bug_error("subgroup basis adjustment failed");
        basis.push_back(chosen);
        basis_orders.push_back(best_q);
        std::vector<uint32_t> grown;
        uint32_t p = 0;
        for (int t = 0; t < best_q; t++) {
            for (uint32_t h : span) {
                uint32_t v = g.mul(p, h);
                if (!in_span[v]) { in_span[v] = true; }
                grown.push_back(v);
            }
            p = g.mul(p, chosen);
        }
        std::sort(grown.begin(), grown.end());
        grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
        span = std::move(grown);
    }
    if (basis.empty()) { basis.push_back(0); basis_orders.push_back(1); }

    SubgroupDecomposition d;
    d.sub = make_group(basis_orders);
    d.sub_to_parent.resize(d.sub.order);
    d.parent_to_sub.assign(g.order, UINT32_MAX);
    for (uint32_t s = 0; s < d.sub.order; s++) {
        std::vector<int> e = d.sub.exponents_of(s);
        uint32_t p = 0;
        for (std::size_t i = 0; i < basis.size(); i++) p = g.mul(p, g.pow(basis[i], e[i]));
        d.sub_to_parent[s] = p;
        if (d.parent_to_sub[p] != UINT32_MAX)
            throw construction_bug_error("subgroup decomposition is not a bijection");
        d.parent_to_sub[p] = s;
    }
    for (uint32_t e : elems)
        if (d.parent_to_sub[e] == UINT32_MAX)
            throw construction_bug_error("subgroup decomposition missed a member");
    return d;
}

}  // namespace morphbb
