#include "surgery.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bga.hpp"
#include "util.hpp"

namespace morphbb {

namespace {

// K_rho = K for even integer rho, K^c for odd; F_1's parameter sets live in
// the complement of K_rho, F_2's in K_rho itself.
GroupSubset layer_coset(const MorphingProtocol& p, int rho, int findex) {
    bool even = (rho % 2) == 0;
    bool use_kc = (findex == 1) == even;
    return use_kc ? p.cokernel : p.kernel;
}

GroupSubset intersect(const GroupSubset& a, const GroupSubset& b) {
    GroupSubset out(a.n);
    for (std::size_t i = 0; i < out.w.size(); i++) out.w[i] = a.w[i] & b.w[i];
    return out;
}


}  // namespace


LogicalSupportReport check_logical_support_criterion(const MorphingProtocol& protocol,
                                                     const PauliOperator& op) {
    const BgaCode& code = protocol.code;
    const Group& g = code.group;
    if (!is_x_logical(code, op))
        throw invalid_logical_error("operator is not an X logical of the code");
    LogicalSupportReport rep;
    rep.pass_a = true;
    rep.pass_b = true;
    const GroupSubset& P = op.x_left;
    const GroupSubset& Q = op.x_right;
    for (uint32_t ge = 0; ge < g.order; ge++) {
        std::size_t overlap = intersect(g.shift(g.inverse_set(code.B), ge), P).popcount() +
                              intersect(g.shift(g.inverse_set(code.A), ge), Q).popcount();
        if (overlap > 2) {
            rep.pass_a = false;
            rep.witness = ge;
            return rep;
        }
    }
    GroupSubset clash = intersect(P, g.shift(Q, g.mul(protocol.a1, g.inv(protocol.b1))));
    if (clash.any()) {
        rep.pass_b = false;
        rep.witness = static_cast<uint32_t>(g.mul(protocol.b1, static_cast<uint32_t>(clash.first_set())));
    }
    return rep;
}

uint32_t SurgeryLayout::pl(int rho, uint32_t p) const {
    return static_cast<uint32_t>(primal_left0 + static_cast<std::size_t>(rho - 1) * p_elems.size() +
                                 p_pos[p]);
}
uint32_t SurgeryLayout::pr(int rho, uint32_t q) const {
    return static_cast<uint32_t>(primal_right0 + static_cast<std::size_t>(rho - 1) * q_elems.size() +
                                 q_pos[q]);
}
uint32_t SurgeryLayout::dual(int layer, uint32_t h) const {
    return static_cast<uint32_t>(dual0 + static_cast<std::size_t>(layer) * h_elems.size() + h_pos[h]);
}

std::string SurgeryLayout::label(uint32_t qubit, const Group& g) const {
    if (qubit < n_bb / 1) {
        if (qubit < g.order) return "L:" + g.element_name(qubit);
        if (qubit < 2 * g.order) return "R:" + g.element_name(qubit - static_cast<uint32_t>(g.order));
    }
    if (qubit >= dual0) {
        std::size_t off = qubit - dual0;
        int layer = static_cast<int>(off / h_elems.size());
        return "d" + std::to_string(2 * layer + 1) + "/2:" +
               g.element_name(h_elems[off % h_elems.size()]);
    }
    if (qubit >= primal_right0) {
        std::size_t off = qubit - primal_right0;
        int rho = static_cast<int>(off / q_elems.size()) + 1;
        return "p" + std::to_string(rho) + "R:" + g.element_name(q_elems[off % q_elems.size()]);
    }
    std::size_t off = qubit - primal_left0;
    int rho = static_cast<int>(off / p_elems.size()) + 1;
    return "p" + std::to_string(rho) + "L:" + g.element_name(p_elems[off % p_elems.size()]);
}

LinkingCode build_linking_code(const MorphingProtocol& protocol, const PauliOperator& op, int r) {
    if (r < 1) throw error("repetition length r must be >= 1");
    LogicalSupportReport crit = check_logical_support_criterion(protocol, op);
    if (!crit.ok()) throw criterion_failure("logical support criterion fails");
    const BgaCode& code = protocol.code;
    const Group& g = code.group;

    LinkingCode link;
    link.P = op.x_left;
    link.Q = op.x_right;
    link.H = GroupSubset(g.order);
    auto add_shifted = [&](const GroupSubset& s, uint32_t by) {
        for (std::size_t e : s.ones())
            link.H.set(g.mul(static_cast<uint32_t>(e), by));
    };
    add_shifted(link.P, protocol.b1);
    add_shifted(link.Q, protocol.a1);
    GroupSubset h_excl = link.H;  // b1 P union a1 Q
    for (uint32_t bj : protocol.b_rest) add_shifted(link.P, bj);
    for (uint32_t aj : protocol.a_rest) add_shifted(link.Q, aj);
    link.Htilde = link.H;
    for (std::size_t e : h_excl.ones()) link.Htilde.set(e, false);

    SurgeryLayout& lay = link.lay;
    lay.n_bb = code.n;
    lay.r = r;
    auto fill = [&](const GroupSubset& s, std::vector<uint32_t>& elems, std::vector<uint32_t>& pos) {
        pos.assign(g.order, UINT32_MAX);
        for (std::size_t e : s.ones()) {
            pos[e] = static_cast<uint32_t>(elems.size());
            elems.push_back(static_cast<uint32_t>(e));
        }
    };
    fill(link.P, lay.p_elems, lay.p_pos);
    fill(link.Q, lay.q_elems, lay.q_pos);
    fill(link.H, lay.h_elems, lay.h_pos);
    lay.primal_left0 = code.n;
    lay.primal_right0 = lay.primal_left0 + static_cast<std::size_t>(r) * lay.p_elems.size();
    lay.dual0 = lay.primal_right0 + static_cast<std::size_t>(r) * lay.q_elems.size();
    lay.total = lay.dual0 + static_cast<std::size_t>(r) * lay.h_elems.size();

    auto blank = [&]() { return PauliBits(lay.total); };

    // left/right X-stabilizers on dual layers rho = 3/2 .. r-1/2
    for (int dl = 1; dl <= r - 1; dl++) {
        for (uint32_t p : lay.p_elems) {
            SurgeryStabilizer s;
            s.op = blank();
            s.op.x.set(lay.pl(dl, p));
            s.op.x.set(lay.pl(dl + 1, p));
            s.op.x.set(lay.dual(dl, g.mul(protocol.b1, p)));
            for (uint32_t bj : protocol.b_rest) s.op.x.set(lay.dual(dl, g.mul(bj, p)));
            s.name = "s(X," + std::to_string(2 * dl + 1) + "/2,L," + g.element_name(p) + ")";
            s.elem = p;
            s.layer2 = 2 * dl + 1;
            link.x_stabs.push_back(std::move(s));
        }
        for (uint32_t q : lay.q_elems) {
            SurgeryStabilizer s;
            s.op = blank();
            s.op.x.set(lay.pr(dl, q));
            s.op.x.set(lay.pr(dl + 1, q));
            s.op.x.set(lay.dual(dl, g.mul(protocol.a1, q)));
            for (uint32_t aj : protocol.a_rest) s.op.x.set(lay.dual(dl, g.mul(aj, q)));
            s.name = "s(X," + std::to_string(2 * dl + 1) + "/2,R," + g.element_name(q) + ")";
            s.elem = q;
            s.layer2 = 2 * dl + 1;
            link.x_stabs.push_back(std::move(s));
        }
    }
    // Z-stabilizers on primal layers rho = 1 .. r
    for (int rho = 1; rho <= r; rho++) {
        for (uint32_t h : lay.h_elems) {
            SurgeryStabilizer s;
            s.op = blank();
            s.op.z.set(lay.dual(rho - 1, h));
            if (rho <= r - 1) s.op.z.set(lay.dual(rho, h));
            int primal = 0;
            auto try_b = [&](uint32_t bj) {
                uint32_t pe = g.mul(g.inv(bj), h);
                if (link.P.get(pe)) { s.op.z.set(lay.pl(rho, pe)); primal++; }
            };
            auto try_a = [&](uint32_t aj) {
                uint32_t qe = g.mul(g.inv(aj), h);
                if (link.Q.get(qe)) { s.op.z.set(lay.pr(rho, qe)); primal++; }
            };
            try_b(protocol.b1);
            for (uint32_t bj : protocol.b_rest) try_b(bj);
            try_a(protocol.a1);
            for (uint32_t aj : protocol.a_rest) try_a(aj);
            if (primal != 2)
                throw construction_bug_error("linking Z-stabilizer has " + std::to_string(primal) +
                                             " primal neighbors");
            s.name = "s(Z," + std::to_string(rho) + "," + g.element_name(h) + ")";
            s.elem = h;
            s.layer2 = 2 * rho;
            link.z_stabs.push_back(std::move(s));
        }
    }
    // ancillary single-qubit Z on the rho = 1/2 layer
    for (uint32_t h : lay.h_elems) {
        SurgeryStabilizer s;
        s.op = blank();
        s.op.z.set(lay.dual(0, h));
        s.name = "s(Z,0," + g.element_name(h) + ")";
        s.elem = h;
        s.layer2 = 1;
        link.ancillary_z.push_back(std::move(s));
    }

    link.x_logical = blank();
    for (uint32_t p : lay.p_elems) link.x_logical.x.set(lay.pl(1, p));
    for (uint32_t q : lay.q_elems) link.x_logical.x.set(lay.pr(1, q));
    link.z_logical = blank();
    for (int rho = 1; rho <= r; rho++) link.z_logical.z.set(lay.pl(rho, lay.p_elems[0]));
    return link;
}

MergedCode build_merged_code(const MorphingProtocol& protocol, const LinkingCode& link) {
    const BgaCode& code = protocol.code;
    const Group& g = code.group;
    const SurgeryLayout& lay = link.lay;
    MergedCode m;
    auto blank = [&]() { return PauliBits(lay.total); };

    // interface X-stabilizers: the rho=0 layer is the BB code itself
    for (uint32_t p : lay.p_elems) {
        SurgeryStabilizer s;
        s.op = blank();
        s.op.x.set(p);  // BB q(L,p)
        s.op.x.set(lay.pl(1, p));
        s.op.x.set(lay.dual(0, g.mul(protocol.b1, p)));
        for (uint32_t bj : protocol.b_rest) s.op.x.set(lay.dual(0, g.mul(bj, p)));
        s.name = "s(X,1/2,L," + g.element_name(p) + ")";
        s.elem = p;
        m.interface_x.push_back(std::move(s));
    }
    for (uint32_t q : lay.q_elems) {
        SurgeryStabilizer s;
        s.op = blank();
        s.op.x.set(static_cast<uint32_t>(g.order) + q);  // BB q(R,q)
        s.op.x.set(lay.pr(1, q));
        s.op.x.set(lay.dual(0, g.mul(protocol.a1, q)));
        for (uint32_t aj : protocol.a_rest) s.op.x.set(lay.dual(0, g.mul(aj, q)));
        s.name = "s(X,1/2,R," + g.element_name(q) + ")";
        s.elem = q;
        m.interface_x.push_back(std::move(s));
    }
    // merged weight-7 Z-stabilizers
    for (uint32_t h : lay.h_elems) {
        SurgeryStabilizer s;
        s.op = blank();
        s.op.z.set(lay.dual(0, h));
        for (std::size_t qb : code.z_row(h).ones()) s.op.z.set(qb);
        s.name = "s(Z,0," + g.element_name(h) + ")merged";
        s.elem = h;
        m.merged_z.push_back(std::move(s));
    }

    // full stabilizer lists
    for (uint32_t ge = 0; ge < g.order; ge++) {
        SurgeryStabilizer s;
        s.op = blank();
        for (std::size_t qb : code.x_row(ge).ones()) s.op.x.set(qb);
        s.name = "s(X,BB," + g.element_name(ge) + ")";
        s.elem = ge;
        m.x_stabs.push_back(std::move(s));
    }
    for (const auto& s : link.x_stabs) m.x_stabs.push_back(s);
    for (const auto& s : m.interface_x) m.x_stabs.push_back(s);
    for (uint32_t ge = 0; ge < g.order; ge++) {
        if (link.H.get(ge)) continue;
        SurgeryStabilizer s;
        s.op = blank();
        for (std::size_t qb : code.z_row(ge).ones()) s.op.z.set(qb);
        s.name = "s(Z,BB," + g.element_name(ge) + ")";
        s.elem = ge;
        m.z_stabs.push_back(std::move(s));
    }
    for (const auto& s : m.merged_z) m.z_stabs.push_back(s);
    for (const auto& s : link.z_stabs) m.z_stabs.push_back(s);

    for (const auto& xs : m.x_stabs)
        for (const auto& zs : m.z_stabs)
            if (xs.op.anticommutes(zs.op))
                throw construction_bug_error("merged stabilizers " + xs.name + " and " + zs.name +
                                             " anticommute");

    m.xx_logical = link.x_logical;
    for (std::size_t qb : protocol.code.support_bits_x(PauliOperator::x_op(link.P, link.Q)).ones())
        m.xx_logical.x.set(qb);
    return m;
}

LatticeSurgeryReport check_lattice_surgery_criteria(const std::vector<PauliBits>& split_x,
                                                    const std::vector<PauliBits>& split_z,
                                                    const std::vector<PauliBits>& merged_x,
                                                    const std::vector<PauliBits>& merged_z,
                                                    const std::vector<uint32_t>& interface_qubits,
                                                    const PauliBits& logical,
                                                    std::size_t n_qubits) {
    auto x_bits = [&](const PauliBits& p) { return p.x; };
    auto z_bits = [&](const PauliBits& p) { return p.z; };
    (void)n_qubits;

    RowSpace merged_x_space(logical.x.n);
    for (const auto& p : merged_x) merged_x_space.insert(x_bits(p));
    LatticeSurgeryReport rep;
    rep.a = merged_x_space.contains(logical.x);
    rep.b = true;
    for (const auto& p : split_x)
        if (!merged_x_space.contains(x_bits(p))) rep.b = false;

    RowSpace zspan(logical.z.n);
    for (const auto& p : split_z) zspan.insert(z_bits(p));
    for (uint32_t q : interface_qubits) {
        BitVec single(logical.z.n);
        single.set(q);
        zspan.insert(single);
    }
    rep.c = true;
    for (const auto& p : merged_z)
        if (!zspan.contains(z_bits(p))) rep.c = false;
    return rep;
}

namespace {

std::vector<CnotRound> color_gates(const GateList& gates, std::size_t n_qubits) {
    std::vector<CnotRound> rounds;
    std::vector<std::vector<uint8_t>> used;
    for (auto [c, t] : gates) {
        std::size_t r = 0;
        for (; r < rounds.size(); r++)
            if (!used[r][c] && !used[r][t]) break;
        if (r == rounds.size()) {
            rounds.emplace_back();
            used.emplace_back(n_qubits, 0);
        }
        rounds[r].push_back({c, t});
        used[r][c] = used[r][t] = 1;
    }
    return rounds;
}

void apply_rounds(PauliBits& p, const std::vector<CnotRound>& rounds, bool inverse) {
    auto cx = [&](uint32_t c, uint32_t t) {
        if (p.x.get(c)) p.x.flip(t);
        if (p.z.get(t)) p.z.flip(c);
    };
    if (!inverse) {
        for (const auto& r : rounds)
            for (auto [c, t] : r) cx(c, t);
    } else {
        for (std::size_t i = rounds.size(); i-- > 0;)
            for (auto [c, t] : rounds[i]) cx(c, t);
    }
}

struct StepGates {
    GateList step1, step2;
    std::vector<MeasureSite> msites;
};

// Linking-code contraction per the layer-alternating coset rule; with
// include_interface the rho=0 layer is the BB code and the step patterns
// extend down to it (yielding the merged-code circuits).
StepGates linking_steps(const MorphingProtocol& protocol, const LinkingCode& link, int findex,
                        bool include_interface) {
    const Group& g = protocol.code.group;
    const SurgeryLayout& lay = link.lay;
    int r = lay.r;
    uint32_t a1 = protocol.a1, b1 = protocol.b1;
    uint32_t a2 = protocol.a_rest[0], a3 = protocol.a_rest.size() > 1 ? protocol.a_rest[1] : a2;
    uint32_t b2 = protocol.b_rest[0], b3 = protocol.b_rest.size() > 1 ? protocol.b_rest[1] : b2;
    StepGates out;

    auto pset = [&](int rho) { return intersect(layer_coset(protocol, rho, findex), link.P); };
    auto qset = [&](int rho) {
        return intersect(g.shift(layer_coset(protocol, rho, findex), g.mul(a1, b1)), link.Q);
    };
    auto hset = [&](int rho, const GroupSubset& among) {
        return intersect(g.shift(layer_coset(protocol, rho, findex), b1), among);
    };
    auto left_at = [&](int rho, uint32_t p) {
        return rho == 0 ? p : lay.pl(rho, p);  // rho=0 is the BB left qubit
    };
    auto right_at = [&](int rho, uint32_t q) {
        return rho == 0 ? static_cast<uint32_t>(g.order) + q : lay.pr(rho, q);
    };

    int rho_lo = include_interface ? 0 : 1;
    // step 1
    for (int rho = rho_lo; rho <= r - 1; rho++) {
        for (std::size_t pe : pset(rho).ones())
            out.step1.push_back({lay.dual(rho, g.mul(b1, static_cast<uint32_t>(pe))),
                                 left_at(rho, static_cast<uint32_t>(pe))});
        for (std::size_t qe : qset(rho).ones())
            out.step1.push_back({lay.dual(rho, g.mul(a1, static_cast<uint32_t>(qe))),
                                 right_at(rho, static_cast<uint32_t>(qe))});
    }
    for (int tau = 1; tau <= r; tau++) {
        for (std::size_t pe : pset(tau + 1).ones()) {
            uint32_t p = static_cast<uint32_t>(pe);
            out.step1.push_back({lay.pl(tau, p), lay.dual(tau - 1, g.mul(b2, p))});
            if (protocol.b_rest.size() > 1)
                out.step1.push_back({lay.pl(tau, p), lay.dual(tau - 1, g.mul(b3, p))});
        }
        for (std::size_t qe : qset(tau + 1).ones()) {
            uint32_t q = static_cast<uint32_t>(qe);
            out.step1.push_back({lay.pr(tau, q), lay.dual(tau - 1, g.mul(a2, q))});
            if (protocol.a_rest.size() > 1)
                out.step1.push_back({lay.pr(tau, q), lay.dual(tau - 1, g.mul(a3, q))});
        }
    }
    if (include_interface) {
        // interface type-2 hook CNOT(q(1/2,h~), q(R, a1^-1 h~)); this is the
        // unique direction/endpoint for which every merged stabilizer either
        // contracts onto a matching measurement or commutes with all of them
        for (std::size_t he : hset(0, link.Htilde).ones()) {
            uint32_t h = static_cast<uint32_t>(he);
            out.step1.push_back({lay.dual(0, h),
                                 static_cast<uint32_t>(g.order) + g.mul(g.inv(a1), h)});
        }
    }
    // step 2
    for (int rho = rho_lo; rho <= r - 1; rho++) {
        for (std::size_t pe : pset(rho).ones())
            out.step2.push_back({lay.dual(rho, g.mul(b1, static_cast<uint32_t>(pe))),
                                 lay.pl(rho + 1, static_cast<uint32_t>(pe))});
        for (std::size_t qe : qset(rho).ones())
            out.step2.push_back({lay.dual(rho, g.mul(a1, static_cast<uint32_t>(qe))),
                                 lay.pr(rho + 1, static_cast<uint32_t>(qe))});
    }
    for (int tau = 1; tau <= r; tau++) {
        for (std::size_t pe : pset(tau).ones())
            out.step2.push_back({lay.pl(tau, static_cast<uint32_t>(pe)),
                                 lay.dual(tau - 1, g.mul(b1, static_cast<uint32_t>(pe)))});
        for (std::size_t qe : qset(tau).ones())
            out.step2.push_back({lay.pr(tau, static_cast<uint32_t>(qe)),
                                 lay.dual(tau - 1, g.mul(a1, static_cast<uint32_t>(qe)))});
    }
    for (int rho = 1; rho <= r - 1; rho++) {
        for (std::size_t he : hset(rho, link.Htilde).ones())
            out.step2.push_back({lay.dual(rho, static_cast<uint32_t>(he)),
                                 lay.dual(rho - 1, static_cast<uint32_t>(he))});
    }

    // step 3 measurements
    std::map<uint32_t, bool> sites;  // qubit -> x_basis
    auto add_site = [&](uint32_t qb, bool x_basis) {
        auto [it, fresh] = sites.emplace(qb, x_basis);
        if (!fresh && it->second != x_basis)
            throw construction_bug_error("conflicting measurement bases on one site");
    };
    for (int rho = 1; rho <= r - 1; rho++) {
        for (std::size_t pe : pset(rho).ones())
            add_site(lay.dual(rho, g.mul(b1, static_cast<uint32_t>(pe))), true);
        for (std::size_t qe : qset(rho).ones())
            add_site(lay.dual(rho, g.mul(a1, static_cast<uint32_t>(qe))), true);
    }
    for (int rho = 1; rho <= r; rho++) {
        for (std::size_t pe : pset(rho).ones())
            if (rho - 1 >= 1) add_site(lay.dual(rho - 1, g.mul(b1, static_cast<uint32_t>(pe))), false);
        for (std::size_t qe : qset(rho).ones())
            if (rho - 1 >= 1) add_site(lay.dual(rho - 1, g.mul(a1, static_cast<uint32_t>(qe))), false);
        for (std::size_t he : hset(rho, link.Htilde).ones())
            if (rho - 1 >= 1) add_site(lay.dual(rho - 1, static_cast<uint32_t>(he)), false);
    }
    if (include_interface) {
        // rho = 1/2 layer measured per the merged pattern: X on the contracted
        // interface X-stabilizer sites, Z on the opposite coset, type-2 sites
        // on the opposite coset only (the rest stay as interface data)
        GroupSubset h_type1(g.order);
        for (std::size_t he : link.H.ones())
            if (!link.Htilde.get(he)) h_type1.set(he);
        for (std::size_t he : hset(0, h_type1).ones())
            add_site(lay.dual(0, static_cast<uint32_t>(he)), true);
        GroupSubset other = g.shift(layer_coset(protocol, 1, findex), b1);
        for (std::size_t he : intersect(other, h_type1).ones())
            add_site(lay.dual(0, static_cast<uint32_t>(he)), false);
        for (std::size_t he : intersect(other, link.Htilde).ones())
            add_site(lay.dual(0, static_cast<uint32_t>(he)), false);
    } else {
        for (uint32_t h : lay.h_elems) add_site(lay.dual(0, h), false);
    }
    for (auto [qb, x_basis] : sites) out.msites.push_back({qb, x_basis});
    return out;
}

}  // namespace

SurgeryProtocol build_surgery_protocol(const MorphingProtocol& protocol, const LinkingCode& link,
                                       const MergedCode& merged) {
    SurgeryProtocol sp;
    sp.bb = protocol;
    sp.link = link;
    sp.merged = merged;
    const Group& g = protocol.code.group;
    std::size_t n = link.lay.total;

    for (int fi = 1; fi <= 2; fi++) {
        StepGates ls = linking_steps(protocol, link, fi, false);
        sp.link_rounds[fi - 1] = color_gates(ls.step1, n);
        for (auto& r : color_gates(ls.step2, n)) sp.link_rounds[fi - 1].push_back(std::move(r));
        sp.link_m[fi - 1] = ls.msites;

        StepGates ms = linking_steps(protocol, link, fi, true);
        // merged step 1 also contains the BB step-1 rounds, step 2 the BB final round
        GateList step1 = ms.step1, step2 = ms.step2;
        for (std::size_t r = 0; r + 1 < protocol.n_rounds; r++)
            for (auto [c, t] : protocol.rounds[fi - 1][r]) step1.push_back({c, t});
        for (auto [c, t] : protocol.rounds[fi - 1][protocol.n_rounds - 1]) step2.push_back({c, t});
        sp.merged_rounds[fi - 1] = color_gates(step1, n);
        for (auto& r : color_gates(step2, n)) sp.merged_rounds[fi - 1].push_back(std::move(r));
        sp.merged_m[fi - 1] = ms.msites;
        for (const auto& s : protocol.measure_sites(fi)) sp.merged_m[fi - 1].push_back(s);
        std::sort(sp.merged_m[fi - 1].begin(), sp.merged_m[fi - 1].end(),
                  [](const MeasureSite& a, const MeasureSite& b) { return a.qubit < b.qubit; });

        GroupSubset data_coset =
            intersect(g.shift(layer_coset(protocol, 0, fi), protocol.b1), link.Htilde);
        for (std::size_t he : data_coset.ones())
            sp.interface_data[fi - 1].push_back(link.lay.dual(0, static_cast<uint32_t>(he)));
    }
    return sp;
}

ContractionClassification classify_contraction(const std::vector<SurgeryStabilizer>& stabs,
                                               const std::vector<CnotRound> rounds[2],
                                               const std::vector<MeasureSite> msites[2],
                                               std::size_t n_qubits) {
    ContractionClassification out;
    out.role.assign(stabs.size(), 0);
    out.every_contracted = true;
    for (int fi = 0; fi < 2; fi++) {
        std::vector<int> basis(n_qubits, -1);
        for (const auto& s : msites[fi]) basis[s.qubit] = s.x_basis;
        BitMat end_rows(0, 2 * n_qubits);
        bool commute_all = true;
        for (std::size_t i = 0; i < stabs.size(); i++) {
            PauliBits p = stabs[i].op;
            apply_rounds(p, rounds[fi], false);
            bool single = p.weight() == 1 && !(p.x.any() && p.z.any());
            if (single) {
                std::size_t qb = p.x.any() ? p.x.first_set() : p.z.first_set();
                int want = p.x.any() ? 1 : 0;
                if (basis[qb] == want) {
                    out.role[i] |= fi + 1;
                    continue;
                }
            }
            bool commutes = true;
            BitVec row(2 * n_qubits);
            for (std::size_t qb = 0; qb < n_qubits; qb++) {
                bool px = p.x.get(qb), pz = p.z.get(qb);
                if (!px && !pz) continue;
                if (basis[qb] == 1 && pz) commutes = false;
                if (basis[qb] == 0 && px) commutes = false;
                if (basis[qb] == -1) {
                    if (px) row.set(qb);
                    if (pz) row.set(n_qubits + qb);
                }
            }
            if (!commutes) {
                commute_all = false;
                if (out.detail.empty())
                    out.detail = stabs[i].name + " neither contracts nor commutes in F" +
                                 std::to_string(fi + 1);
                continue;
            }
            end_rows.add_row(row);
        }
        out.expanding_commute[fi] = commute_all;
        out.end_rank[fi] = gf2_rank(end_rows);
    }
    for (std::size_t i = 0; i < stabs.size(); i++)
        if (out.role[i] == 0) {
            out.every_contracted = false;
            if (out.detail.empty()) out.detail = stabs[i].name + " is never contracted";
        }
    return out;
}

PauliBits end_cycle_restrict(const PauliBits& op, const std::vector<CnotRound>& rounds,
                             const std::vector<MeasureSite>& msites) {
    PauliBits p = op;
    apply_rounds(p, rounds, false);
    for (const auto& s : msites) {
        if ((s.x_basis && p.z.get(s.qubit)) || (!s.x_basis && p.x.get(s.qubit)))
            throw construction_bug_error("operator anticommutes with a measurement");
        p.x.set(s.qubit, false);
        p.z.set(s.qubit, false);
    }
    return p;
}

std::vector<PauliBits> end_cycle_rows(const std::vector<SurgeryStabilizer>& stabs,
                                      const std::vector<CnotRound>& rounds,
                                      const std::vector<MeasureSite>& msites,
                                      std::size_t n_qubits) {
    std::vector<PauliBits> out;
    for (const auto& s : stabs) {
        PauliBits p = s.op;
        apply_rounds(p, rounds, false);
        if (p.weight() == 1 && !(p.x.any() && p.z.any())) continue;  // contracted
        (void)n_qubits;
        out.push_back(end_cycle_restrict(s.op, rounds, msites));
    }
    return out;
}

namespace {

void add_rounds_to_circuit(Circuit& c, const std::vector<CnotRound>& rounds, bool inverse) {
    auto emit = [&](const CnotRound& r) {
        std::vector<uint32_t> qs;
        for (auto [ctrl, tgt] : r) { qs.push_back(ctrl); qs.push_back(tgt); }
        if (!qs.empty()) c.append(Op::CX, qs);
        c.tick();
    };
    if (!inverse) {
        for (const auto& r : rounds) emit(r);
    } else {
        for (std::size_t i = rounds.size(); i-- > 0;) emit(rounds[i]);
    }
}

void add_msites(Circuit& c, const std::vector<MeasureSite>& sites, bool as_reset) {
    std::vector<uint32_t> xs, zs;
    for (const auto& s : sites) (s.x_basis ? xs : zs).push_back(s.qubit);
    if (as_reset) {
        if (!xs.empty()) c.append(Op::RX, xs);
        if (!zs.empty()) c.append(Op::RZ, zs);
    } else {
        if (!xs.empty()) c.append(Op::MX, xs);
        if (!zs.empty()) c.append(Op::MZ, zs);
    }
    c.tick();
}

}  // namespace

Circuit SurgeryProtocol::merged_round_circuit(int start_index) const {
    int i = start_index - 1, j = start_index == 1 ? 1 : 0;
    Circuit c;
    c.n_qubits = link.lay.total;
    add_msites(c, merged_m[i], true);
    add_rounds_to_circuit(c, merged_rounds[i], true);
    add_rounds_to_circuit(c, merged_rounds[j], false);
    add_msites(c, merged_m[j], false);
    return c;
}

Circuit SurgeryProtocol::split_round_circuit(int start_index) const {
    int i = start_index - 1, j = start_index == 1 ? 1 : 0;
    Circuit c;
    c.n_qubits = link.lay.total;
    std::vector<MeasureSite> mi = link_m[i], mj = link_m[j];
    for (const auto& s : bb.measure_sites(i + 1)) mi.push_back(s);
    for (const auto& s : bb.measure_sites(j + 1)) mj.push_back(s);
    auto combined = [&](int fi) {
        std::vector<CnotRound> rounds = link_rounds[fi];
        // run the BB rounds in parallel with the linking rounds
        for (std::size_t r = 0; r < bb.n_rounds; r++) {
            if (rounds.size() <= r) rounds.emplace_back();
            for (auto [ctrl, tgt] : bb.rounds[fi][r]) rounds[r].push_back({ctrl, tgt});
        }
        return rounds;
    };
    add_msites(c, mi, true);
    add_rounds_to_circuit(c, combined(i), true);
    add_rounds_to_circuit(c, combined(j), false);
    add_msites(c, mj, false);
    return c;
}

int merged_distance_bound_factor(const SurgeryProtocol& sp, int index) {
    std::size_t n = sp.link.lay.total;
    std::vector<uint8_t> measured(n, 0);
    for (const auto& s : sp.merged_m[index - 1]) measured[s.qubit] = 1;
    int c = 0;
    for (uint32_t qb = 0; qb < n; qb++) {
        if (measured[qb]) continue;
        for (int basis = 0; basis < 2; basis++) {
            PauliBits p(n);
            if (basis) p.x.set(qb); else p.z.set(qb);
            apply_rounds(p, sp.merged_rounds[index - 1], true);
            c = std::max(c, static_cast<int>(p.weight()));
        }
    }
    return c;
}

ScheduleOutcome run_surgery_schedule(const SurgeryProtocol& sp, bool flip_xx) {
    const MorphingProtocol& bb = sp.bb;
    const BgaCode& code = bb.code;
    const Group& g = code.group;
    std::size_t n = sp.link.lay.total;

    // split end-cycle generators via the classification machinery
    std::vector<SurgeryStabilizer> split_stabs;
    for (uint32_t ge = 0; ge < g.order; ge++) {
        SurgeryStabilizer s;
        s.op = PauliBits(n);
        for (std::size_t qb : code.x_row(ge).ones()) s.op.x.set(qb);
        s.name = "bbx";
        split_stabs.push_back(std::move(s));
        SurgeryStabilizer z;
        z.op = PauliBits(n);
        for (std::size_t qb : code.z_row(ge).ones()) z.op.z.set(qb);
        z.name = "bbz";
        split_stabs.push_back(std::move(z));
    }
    for (const auto& s : sp.link.x_stabs) split_stabs.push_back(s);
    for (const auto& s : sp.link.z_stabs) split_stabs.push_back(s);
    for (const auto& s : sp.link.ancillary_z) split_stabs.push_back(s);

    std::vector<CnotRound> split_rounds[2];
    std::vector<MeasureSite> split_m[2];
    for (int fi = 0; fi < 2; fi++) {
        split_rounds[fi] = sp.link_rounds[fi];
        for (std::size_t r = 0; r < bb.n_rounds; r++) {
            if (split_rounds[fi].size() <= r) split_rounds[fi].emplace_back();
            for (auto [c, t] : bb.rounds[fi][r]) split_rounds[fi][r].push_back({c, t});
        }
        split_m[fi] = sp.link_m[fi];
        for (const auto& s : bb.measure_sites(fi + 1)) split_m[fi].push_back(s);
    }

    // end-cycle C~1 rows of the split system
    std::vector<int> basis1(n, -1);
    for (const auto& s : split_m[0]) basis1[s.qubit] = s.x_basis;
    auto end_restrict = [&](PauliBits p) {
        apply_rounds(p, split_rounds[0], false);
        for (std::size_t qb = 0; qb < n; qb++) {
            if (basis1[qb] == -1) continue;
            bool px = p.x.get(qb), pz = p.z.get(qb);
            if ((basis1[qb] == 1 && pz) || (basis1[qb] == 0 && px))
                throw construction_bug_error("operator does not survive M_1");
            p.x.set(qb, false);
            p.z.set(qb, false);
        }
        return p;
    };

    std::vector<PauliBits> seed_rows;
    for (const auto& s : split_stabs) {
        PauliBits p = s.op;
        apply_rounds(p, split_rounds[0], false);
        bool single = p.weight() == 1 && !(p.x.any() && p.z.any());
        if (single) continue;  // contracted: not an end-cycle generator
        seed_rows.push_back(end_restrict(s.op));
    }

    // Bell pair of the two measured logicals, pushed to the end-cycle frame
    PauliBits xx_mid = sp.merged.xx_logical;
    PauliBits zz_mid = sp.link.z_logical;
    {
        // BB-side Z partner anticommuting with the measured BB X logical
        LogicalBasis basis = logical_basis(code);
        PauliOperator xop = PauliOperator::x_op(sp.link.P, sp.link.Q);
        BitVec xbits = code.support_bits_x(xop);
        bool found = false;
        for (std::size_t i = 0; i < basis.size(); i++) {
            if (xbits.dot(code.support_bits_z(basis.z[i]))) {
                for (std::size_t qb : code.support_bits_z(basis.z[i]).ones()) zz_mid.z.flip(qb);
                found = true;
                break;
            }
        }
        if (!found) throw construction_bug_error("measured logical pairs with no basis Z");
    }
    PauliBits xx_end = end_restrict(xx_mid);
    PauliBits zz_end = end_restrict(zz_mid);

    // schedule circuit: R_int, two merged rounds, M_int
    Circuit c;
    c.n_qubits = n;
    c.append(Op::RZ, sp.interface_data[0]);
    c.tick();
    std::size_t round1_start = c.instructions.size();
    Circuit r1 = sp.merged_round_circuit(1);
    for (const auto& ins : r1.instructions) c.instructions.push_back(ins);
    std::size_t round1_end = c.instructions.size();
    // index of round 1's measurement layer (the M_2 block at its end)
    std::size_t round1_meas = round1_end;
    for (std::size_t i = round1_start; i < round1_end; i++) {
        if (c.instructions[i].op == Op::MX || c.instructions[i].op == Op::MZ) {
            round1_meas = i;
            break;
        }
    }
    Circuit r2 = sp.merged_round_circuit(2);
    for (const auto& ins : r2.instructions) c.instructions.push_back(ins);
    c.append(Op::MZ, sp.interface_data[0]);
    // one split QEC round re-fixes the interface-adjacent split stabilizers
    Circuit r3 = sp.split_round_circuit(1);
    for (const auto& ins : r3.instructions) c.instructions.push_back(ins);

    TableauSim sim(n, c.count_measurements(), 4 * n);
    for (const auto& row : seed_rows) sim.seed_row(row);
    sim.seed_row(xx_end, flip_xx);
    sim.seed_row(zz_end, false);

    // Run up to (but not through) round 1's measurement layer; there the
    // product of the contracted interface X-stabilizer sites has a
    // predetermined eigenvalue, which equals the XOR of the upcoming
    // measurement outcomes: that XOR is the inferred logical value.
    sim.run(c, 0, round1_meas);
    ScheduleOutcome out;
    {
        PauliBits prod(n);
        std::size_t contracted = 0;
        for (const auto& s : sp.merged.interface_x) {
            PauliBits p = s.op;
            apply_rounds(p, sp.merged_rounds[1], false);
            bool single = p.weight() == 1 && p.x.any() && !p.z.any();
            if (!single) continue;  // expanding in F_2
            std::size_t qb = p.x.first_set();
            prod.x.flip(qb);
            contracted++;
        }
        if (contracted == 0) throw construction_bug_error("no contracted interface stabilizers");
        OutcomeExpr expr = sim.query(prod);
        if (!expr.deterministic() || !expr.records.empty()) return out;
        out.deterministic = true;
        out.inferred_value = expr.constant;
        out.direct_value = flip_xx;
    }
    sim.run(c, round1_meas, c.instructions.size());
    // after M_int and one split round the system sits in the shifted split
    // end-cycle code; every one of its generators must be deterministic
    std::vector<int> basis2(n, -1);
    for (const auto& s : split_m[1]) basis2[s.qubit] = s.x_basis;
    out.split_restored = true;
    for (const auto& s : split_stabs) {
        PauliBits p = s.op;
        apply_rounds(p, split_rounds[1], false);
        if (p.weight() == 1 && !(p.x.any() && p.z.any())) continue;  // contracted in F_2
        for (std::size_t qb = 0; qb < n; qb++) {
            if (basis2[qb] == -1) continue;
            p.x.set(qb, false);
            p.z.set(qb, false);
        }
        OutcomeExpr e = sim.query(p);
        if (!e.deterministic()) out.split_restored = false;
    }
    return out;
}

}  // namespace morphbb
