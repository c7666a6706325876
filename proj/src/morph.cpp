#include "morph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "util.hpp"

namespace morphbb {

Variant parse_variant(const std::string& s) {
    if (s == "standard") return Variant::standard;
    if (s == "reverse_round3") return Variant::reverse_round3;
    if (s == "reverse_round2") return Variant::reverse_round2;
    throw parse_error("unknown variant '" + s + "'");
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::standard: return "standard";
        case Variant::reverse_round3: return "reverse_round3";
        case Variant::reverse_round2: return "reverse_round2";
    }
    return "?";
}

static GroupSubset subset_and(const GroupSubset& a, const GroupSubset& b) {
    GroupSubset out(a.n);
    for (std::size_t i = 0; i < out.w.size(); i++) out.w[i] = a.w[i] & b.w[i];
    return out;
}

ContractingSets contracting_sets(const BgaCode& code, const Homomorphism& hom) {
    const Group& g = code.group;
    auto pick = [&](const std::vector<uint32_t>& elems, const char* set_name) {
        // the distinguished element is the one f maps differently from all others
        std::vector<bool> val;
        for (uint32_t e : elems) val.push_back(hom.eval(g, e));
        for (std::size_t i = 0; i < elems.size(); i++) {
            bool distinct = true;
            bool rest_equal = true;
            bool rest_val = false;
            bool have_rest = false;
            for (std::size_t j = 0; j < elems.size(); j++) {
                if (j == i) continue;
                if (val[j] == val[i]) distinct = false;
                if (!have_rest) { rest_val = val[j]; have_rest = true; }
                else if (val[j] != rest_val) rest_equal = false;
            }
            if (distinct && rest_equal) return elems[i];
        }
        throw criterion_failure(std::string("homomorphism criterion fails on set ") + set_name);
    };
    ContractingSets s;
    s.a1 = pick(code.a_order, "A");
    s.b1 = pick(code.b_order, "B");
    GroupSubset k = hom.kernel(g), kc = hom.complement(g);
    s.gx1 = g.shift(k, s.a1);
    s.gz1 = g.shift(kc, s.b1);
    s.gx2 = g.shift(kc, s.a1);
    s.gz2 = g.shift(k, s.b1);
    return s;
}

CriteriaReport check_contract_criteria(const BgaCode& code, const ContractingSets& sets) {
    const Group& g = code.group;
    const GroupSubset &gx1 = sets.gx1, &gz1 = sets.gz1, &gx2 = sets.gx2, &gz2 = sets.gz2;
    uint32_t a1 = sets.a1, b1 = sets.b1;
    std::vector<uint32_t> arest, brest;
    for (uint32_t e : code.a_order)
        if (e != a1) arest.push_back(e);
    for (uint32_t e : code.b_order)
        if (e != b1) brest.push_back(e);

    CriteriaReport rep;
    rep.x_ok = rep.xz_ok = rep.z_ok = true;
    auto fail = [&](bool& flag, const std::string& msg) {
        flag = false;
        if (rep.first_counterexample.empty()) rep.first_counterexample = msg;
    };
    const GroupSubset* gx[2] = {&gx1, &gx2};
    const GroupSubset* gz[2] = {&gz1, &gz2};
    for (int i = 0; i < 2; i++) {
        for (uint32_t aj : arest) {
            GroupSubset moved = g.shift(*gx[i], g.mul(g.inv(aj), a1));
            GroupSubset clash = subset_and(moved, *gx[i]);
            if (clash.any())
                fail(rep.x_ok, "X-criterion: a_j^-1 a_1 g in G_X," + std::to_string(i + 1) +
                                   " for g with image " + g.element_name(static_cast<uint32_t>(clash.first_set())));
        }
        for (uint32_t bj : brest) {
            GroupSubset moved = g.shift(*gx[i], g.mul(b1, g.inv(bj)));
            if (subset_and(moved, *gx[i]).any()) fail(rep.x_ok, "X-criterion: g b_1 b_j^-1 clash");
        }
        // XZ: j = k = 1
        if (subset_and(g.shift(*gx[i], g.mul(a1, b1)), *gz[i]).any())
            fail(rep.xz_ok, "XZ-criterion: a_1 g b_1 in G_Z," + std::to_string(i + 1));
        for (uint32_t aj : arest)
            for (uint32_t bk : brest)
                if (subset_and(g.shift(*gx[i], g.mul(aj, bk)), *gz[i]).any())
                    fail(rep.xz_ok, "XZ-criterion: a_j g b_k in G_Z," + std::to_string(i + 1));
        for (uint32_t aj : arest)
            if (subset_and(g.shift(*gz[i], g.mul(aj, g.inv(a1))), *gz[i]).any())
                fail(rep.z_ok, "Z-criterion: a_j a_1^-1 g in G_Z," + std::to_string(i + 1));
        for (uint32_t bj : brest)
            if (subset_and(g.shift(*gz[i], g.mul(g.inv(b1), bj)), *gz[i]).any())
                fail(rep.z_ok, "Z-criterion: g b_1^-1 b_j in G_Z," + std::to_string(i + 1));
    }
    return rep;
}

MorphingProtocol build_protocol(const BgaCode& code, const Homomorphism& hom, Variant variant) {
    const Group& g = code.group;
    MorphingProtocol p;
    p.code = code;
    p.hom = hom;
    p.variant = variant;
    p.kernel = hom.kernel(g);
    p.cokernel = hom.complement(g);
    p.sets = contracting_sets(code, hom);
    p.a1 = p.sets.a1;
    p.b1 = p.sets.b1;
    for (uint32_t e : code.a_order)
        if (e != p.a1) p.a_rest.push_back(e);
    for (uint32_t e : code.b_order)
        if (e != p.b1) p.b_rest.push_back(e);
    p.measures_left = variant == Variant::reverse_round3;

    std::size_t wa = code.a_order.size(), wb = code.b_order.size();
    if (variant == Variant::reverse_round2 && (wa != 3 || wb != 3))
        throw error("reverse_round2 is defined for weight-6 codes only");

    std::size_t l = g.order;
    auto lq = [&](uint32_t e) { return e; };
    auto rq = [&](uint32_t e) { return static_cast<uint32_t>(l) + e; };

    std::size_t n_cnot_rounds = std::max(wa, wb);  // step-1 rounds + final round
    if (n_cnot_rounds > 8) throw error("stabilizer weight too large for the round table");
    p.n_rounds = n_cnot_rounds;

    for (int idx = 0; idx < 2; idx++) {
        const GroupSubset& gs = idx == 0 ? p.kernel : p.cokernel;    // g side
        const GroupSubset& hs = idx == 0 ? p.cokernel : p.kernel;    // h side
        std::vector<uint32_t> gels, hels;
        for (std::size_t e : gs.ones()) gels.push_back(static_cast<uint32_t>(e));
        for (std::size_t e : hs.ones()) hels.push_back(static_cast<uint32_t>(e));

        auto add_round = [&](std::size_t r, CnotRound round) {
            std::vector<uint8_t> used(code.n, 0);
            for (auto [c, t] : round) {
                if (used[c] || used[t])
                    throw criterion_failure("round " + std::to_string(r + 1) + " of F" +
                                            std::to_string(idx + 1) + " touches a qubit twice");
                used[c] = used[t] = 1;
            }
            p.rounds[idx][r] = std::move(round);
        };

        std::size_t n_step1 = n_cnot_rounds - 1;
        for (std::size_t r = 0; r < n_step1; r++) {
            CnotRound round;
            std::size_t jb = wb - r;  // b index used this round (>= 2)
            std::size_t ja = wa - r;
            bool reverse2 = variant == Variant::reverse_round2 && r == 1;
            if (jb >= 2) {
                uint32_t bj = p.b_rest[jb - 2];
                for (uint32_t ge : gels) {
                    uint32_t target = rq(g.mul(g.mul(g.inv(p.a1), bj), ge));
                    if (reverse2) round.push_back({target, lq(ge)});
                    else round.push_back({lq(ge), target});
                }
            }
            if (ja >= 2) {
                uint32_t aj = p.a_rest[ja - 2];
                for (uint32_t he : hels) {
                    uint32_t ctrl = rq(g.mul(g.mul(g.inv(aj), p.b1), he));
                    if (reverse2) round.push_back({lq(he), ctrl});
                    else round.push_back({ctrl, lq(he)});
                }
            }
            add_round(r, std::move(round));
        }
        // final round and measurement sites
        CnotRound fin;
        std::vector<MeasureSite> sites;
        if (variant == Variant::reverse_round2) {
            uint32_t a2 = p.a_rest[0], b2 = p.b_rest[0];
            uint32_t s22 = g.mul(g.inv(a2), b2);
            for (uint32_t he : hels) fin.push_back({rq(g.mul(s22, he)), lq(he)});
            for (uint32_t ge : gels) fin.push_back({lq(ge), rq(g.mul(s22, ge))});
            for (uint32_t he : hels) sites.push_back({rq(g.mul(s22, he)), true});
            for (uint32_t ge : gels) sites.push_back({rq(g.mul(s22, ge)), false});
        } else {
            uint32_t s11 = g.mul(g.inv(p.a1), p.b1);
            bool rev3 = variant == Variant::reverse_round3;
            for (uint32_t ge : gels) {
                if (rev3) fin.push_back({lq(ge), rq(g.mul(s11, ge))});
                else fin.push_back({rq(g.mul(s11, ge)), lq(ge)});
            }
            for (uint32_t he : hels) {
                if (rev3) fin.push_back({rq(g.mul(s11, he)), lq(he)});
                else fin.push_back({lq(he), rq(g.mul(s11, he))});
            }
            for (uint32_t ge : gels)
                sites.push_back({rev3 ? lq(ge) : rq(g.mul(s11, ge)), true});
            for (uint32_t he : hels)
                sites.push_back({rev3 ? lq(he) : rq(g.mul(s11, he)), false});
        }
        add_round(n_cnot_rounds - 1, std::move(fin));
        std::sort(sites.begin(), sites.end(),
                  [](const MeasureSite& a, const MeasureSite& b) { return a.qubit < b.qubit; });
        p.m_sites[idx] = std::move(sites);
    }
    return p;
}

Circuit MorphingProtocol::f_circuit(int index) const {
    Circuit c;
    c.n_qubits = code.n;
    for (std::size_t r = 0; r < n_rounds; r++) {
        if (r) c.tick();
        for (auto [ctrl, tgt] : rounds[index - 1][r]) c.cx(ctrl, tgt);
    }
    return c;
}

std::vector<uint32_t> MorphingProtocol::data_qubits(int index) const {
    std::vector<uint8_t> measured(code.n, 0);
    for (const auto& s : m_sites[index - 1]) measured[s.qubit] = 1;
    std::vector<uint32_t> out;
    for (uint32_t q = 0; q < code.n; q++)
        if (!measured[q]) out.push_back(q);
    return out;
}

std::string MorphingProtocol::summary_json() const {
    nlohmann::json j;
    const Group& g = code.group;
    j["variant"] = variant_name(variant);
    j["hom"] = hom.name(g);
    j["a1"] = g.element_name(a1);
    j["b1"] = g.element_name(b1);
    j["n"] = code.n;
    j["k"] = code.k;
    auto names = [&](const GroupSubset& s) { return g.subset_names(s); };
    j["G_X1"] = names(sets.gx1);
    j["G_Z1"] = names(sets.gz1);
    j["G_X2"] = names(sets.gx2);
    j["G_Z2"] = names(sets.gz2);
    std::size_t cnots = 0;
    for (int i = 0; i < 2; i++)
        for (std::size_t r = 0; r < n_rounds; r++) cnots += rounds[i][r].size();
    j["cnot_count_total"] = cnots;
    j["cnot_rounds_per_contraction"] = n_rounds;
    j["measurements_per_round"] = m_sites[0].size();
    return j.dump(2);
}

namespace {

PauliBits stab_pauli(const BgaCode& code, const PauliOperator& op) {
    PauliBits p(code.n);
    p.x = code.support_bits_x(op);
    p.z = code.support_bits_z(op);
    return p;
}

}  // namespace

VerifyReport verify_contraction(const MorphingProtocol& protocol) {
    const BgaCode& code = protocol.code;
    const Group& g = code.group;
    VerifyReport rep;
    rep.ok = true;
    auto fail = [&](const std::string& msg) {
        if (rep.ok) rep.detail = msg;
        rep.ok = false;
    };

    for (int index = 1; index <= 2 && rep.ok; index++) {
        Circuit f = protocol.f_circuit(index);
        const GroupSubset& cx = index == 1 ? protocol.sets.gx1 : protocol.sets.gx2;
        const GroupSubset& cz = index == 1 ? protocol.sets.gz1 : protocol.sets.gz2;
        std::vector<int> site_basis(code.n, -1);  // 1 = X, 0 = Z
        for (const auto& s : protocol.measure_sites(index)) site_basis[s.qubit] = s.x_basis;

        BitMat end_rows(0, 2 * code.n);
        for (uint32_t ge = 0; ge < g.order; ge++) {
            for (int type = 0; type < 2; type++) {
                bool contracting = type == 0 ? cx.get(ge) : cz.get(ge);
                PauliOperator op = type == 0 ? code.x_stabilizer(ge) : code.z_stabilizer(ge);
                PauliBits prop = heisenberg_propagate(f, stab_pauli(code, op));
                std::string label = std::string(type == 0 ? "s(X," : "s(Z,") + g.element_name(ge) + ")";
                if (contracting) {
                    if (prop.weight() != 1 || (prop.x.any() && prop.z.any())) {
                        fail(label + " not contracted to a single X or Z by F" + std::to_string(index));
                        break;
                    }
                    std::size_t q = prop.x.any() ? prop.x.first_set() : prop.z.first_set();
                    int want = prop.x.any() ? 1 : 0;
                    if (site_basis[q] != want) {
                        fail(label + " contracted onto qubit " + std::to_string(q) +
                             " but not measured in the matching basis");
                        break;
                    }
                } else {
                    // must commute with every measurement: no Z part on X-sites, no X part on Z-sites
                    BitVec data_x(code.n), data_z(code.n);
                    bool bad = false;
                    for (std::size_t q = 0; q < code.n; q++) {
                        bool px = prop.x.get(q), pz = prop.z.get(q);
                        if (!px && !pz) continue;
                        if (site_basis[q] == 1 && pz) { fail(label + " anticommutes with M_X on qubit " + std::to_string(q)); bad = true; break; }
                        if (site_basis[q] == 0 && px) { fail(label + " anticommutes with M_Z on qubit " + std::to_string(q)); bad = true; break; }
                        if (site_basis[q] == -1) {
                            if (px) data_x.set(q);
                            if (pz) data_z.set(q);
                        }
                    }
                    if (bad) break;
                    BitVec row(2 * code.n);
                    for (std::size_t q : data_x.ones()) row.set(q);
                    for (std::size_t q : data_z.ones()) row.set(code.n + q);
                    end_rows.add_row(row);
                }
            }
        }
        if (!rep.ok) break;
        std::size_t rank = gf2_rank(end_rows);
        rep.end_cycle_rank[index - 1] = rank;
        std::size_t n_tilde = code.n - protocol.measure_sites(index).size();
        if (rank != n_tilde - code.k)
            fail("end-cycle stabilizer rank " + std::to_string(rank) + " != n~ - k = " +
                 std::to_string(n_tilde - code.k) + " for F" + std::to_string(index));
    }
    return rep;
}

PauliOperator propagate_logical_mid_to_end(const MorphingProtocol& protocol, int index,
                                           const PauliOperator& op) {
    const BgaCode& code = protocol.code;
    const Group& g = code.group;
    bool x_type = op.is_x_type();
    if (!x_type && !op.is_z_type())
        throw not_a_logical_error("mixed operators must go through the tableau simulator");
    const GroupSubset& P = x_type ? op.x_left : op.z_left;
    const GroupSubset& Q = x_type ? op.x_right : op.z_right;

    // mid-cycle logical condition
    GroupSubset cond = x_type
        ? [&] { GroupSubset c = g.algebra_mul(code.B, P); c.xor_in(g.algebra_mul(code.A, Q)); return c; }()
        : [&] { GroupSubset c = g.algebra_mul(g.inverse_set(code.A), P);
                c.xor_in(g.algebra_mul(g.inverse_set(code.B), Q)); return c; }();
    if (cond.any())
        throw not_a_logical_error("operator violates the mid-cycle logical condition");

    const GroupSubset& K = protocol.kernel;
    const GroupSubset& Kc = protocol.cokernel;
    const GroupSubset& keven = index == 1 ? K : Kc;   // the coset playing K's role for F_index
    const GroupSubset& kodd = index == 1 ? Kc : K;
    uint32_t a1 = protocol.a1, b1 = protocol.b1;

    GroupSubset out(g.order);
    if (protocol.variant == Variant::reverse_round2) {
        uint32_t a2 = protocol.a_rest[0], a3 = protocol.a_rest[1];
        uint32_t b2 = protocol.b_rest[0], b3 = protocol.b_rest[1];
        auto sh = [&](const GroupSubset& s, uint32_t e) { return g.shift(s, e); };
        if (x_type) {
            GroupSubset t1 = sh(P, g.mul(g.inv(b2), b3));
            t1.xor_in(sh(Q, g.mul(a1, g.inv(b2))));
            GroupSubset t2 = sh(P, g.mul(g.mul(g.inv(a1), a2), g.mul(g.inv(b2), b3)));
            t2.xor_in(sh(Q, g.mul(a3, g.inv(b1))));
            t2.xor_in(sh(Q, g.mul(a2, g.inv(b2))));
            out = P;
            out.xor_in(subset_and(t1, keven));
            out.xor_in(subset_and(t2, kodd));
        } else {
            GroupSubset t1 = sh(P, g.mul(a2, g.inv(a3)));
            t1.xor_in(sh(Q, g.mul(a2, g.inv(b1))));
            GroupSubset t2 = sh(P, g.mul(g.mul(a2, g.inv(a3)), g.mul(b1, g.inv(b2))));
            t2.xor_in(sh(Q, g.mul(a1, g.inv(b3))));
            t2.xor_in(sh(Q, g.mul(a2, g.inv(b2))));
            out = P;
            out.xor_in(subset_and(t1, kodd));
            out.xor_in(subset_and(t2, keven));
        }
    } else {
        uint32_t a1b1 = g.mul(a1, b1);
        if (x_type) {
            GroupSubset coset = g.shift(keven, a1b1);
            GroupSubset captured = subset_and(Q, coset);
            out = P;
            out.xor_in(g.shift(g.algebra_mul(code.A, captured), g.inv(b1)));
        } else {
            GroupSubset coset = g.shift(kodd, a1b1);
            GroupSubset captured = subset_and(Q, coset);
            out = P;
            out.xor_in(g.shift(g.algebra_mul(g.inverse_set(code.B), captured), a1));
        }
    }

    GroupSubset empty(g.order);
    if (protocol.variant == Variant::reverse_round3) {
        // end-cycle code lives on the right qubits, labels shifted by a1^-1 b1
        GroupSubset right = g.shift(out, g.mul(g.inv(a1), b1));
        return x_type ? PauliOperator::x_op(empty, right) : PauliOperator::z_op(empty, right);
    }
    return x_type ? PauliOperator::x_op(out, empty) : PauliOperator::z_op(out, empty);
}

EndCycleCode end_cycle_code(const MorphingProtocol& protocol, int index) {
    const BgaCode& code = protocol.code;
    const Group& g = code.group;
    EndCycleCode e;
    e.index = index;
    e.on_right = protocol.measures_left;
    e.n_tilde = g.order;

    const GroupSubset& exp_x = index == 1 ? protocol.sets.gx2 : protocol.sets.gx1;
    const GroupSubset& exp_z = index == 1 ? protocol.sets.gz2 : protocol.sets.gz1;
    for (std::size_t ge : exp_x.ones()) {
        PauliOperator prop = propagate_logical_mid_to_end(
            protocol, index, code.x_stabilizer(static_cast<uint32_t>(ge)));
        e.x_gen_support.push_back(e.on_right ? prop.x_right : prop.x_left);
    }
    for (std::size_t ge : exp_z.ones()) {
        PauliOperator prop = propagate_logical_mid_to_end(
            protocol, index, code.z_stabilizer(static_cast<uint32_t>(ge)));
        e.z_gen_support.push_back(e.on_right ? prop.z_right : prop.z_left);
    }

    e.kdec = decompose_subgroup(g, protocol.kernel);
    GroupSubset kc = protocol.cokernel;
    e.relabel_r = static_cast<uint32_t>(kc.first_set());

    // data ordering: kernel block (by subgroup index), then the r-shifted block
    std::size_t half = e.kdec.sub.order;
    std::vector<uint32_t> label_of(2 * half);
    for (uint32_t s = 0; s < half; s++) {
        uint32_t k0 = e.kdec.sub_to_parent[s];
        uint32_t lab0 = k0, lab1 = g.mul(e.relabel_r, k0);
        if (index == 2) { lab0 = g.mul(lab0, e.relabel_r); lab1 = g.mul(lab1, e.relabel_r); }
        label_of[s] = lab0;
        label_of[half + s] = lab1;
    }
    std::vector<std::size_t> local_of(g.order);
    for (std::size_t i = 0; i < 2 * half; i++) local_of[label_of[i]] = i;
    e.qubit_map.resize(2 * half);
    uint32_t a1b1inv = g.mul(g.inv(protocol.a1), protocol.b1);
    for (std::size_t i = 0; i < 2 * half; i++) {
        uint32_t lab = label_of[i];
        if (e.on_right) e.qubit_map[i] = g.order + g.mul(a1b1inv, lab);
        else e.qubit_map[i] = lab;
    }

    auto rows_from = [&](const std::vector<GroupSubset>& gens) {
        BitMat m(0, 2 * half);
        for (const auto& s : gens) {
            BitVec row(2 * half);
            GroupSubset labels = s;
            if (e.on_right) labels = g.shift(s, g.inv(a1b1inv));  // back to left-label space
            for (std::size_t lab : labels.ones()) row.set(local_of[lab]);
            m.add_row(row);
        }
        return m;
    };
    e.hx = rows_from(e.x_gen_support);
    e.hz = rows_from(e.z_gen_support);
    e.k_tilde = e.n_tilde - gf2_rank(e.hx) - gf2_rank(e.hz);

    if (protocol.variant != Variant::reverse_round2) {
        // 2BGA form over the kernel: A~ = (a1^-1(A-a1) + b1^-1(B-b1)) r,
        // B~ = 1 + a1^-1 b1^-1 (A-a1)(B-b1)
        GroupSubset rest_a = code.A;
        rest_a.flip(protocol.a1);
        GroupSubset rest_b = code.B;
        rest_b.flip(protocol.b1);
        GroupSubset at = g.shift(rest_a, g.inv(protocol.a1));
        at.xor_in(g.shift(rest_b, g.inv(protocol.b1)));
        at = g.shift(at, e.relabel_r);
        GroupSubset bt = g.shift(g.algebra_mul(rest_a, rest_b),
                                 g.mul(g.inv(protocol.a1), g.inv(protocol.b1)));
        bt.flip(0);  // + identity
        e.a_tilde = GroupSubset(half);
        e.b_tilde = GroupSubset(half);
        for (std::size_t lab : at.ones()) {
            uint32_t s = e.kdec.parent_to_sub[lab];
            if (s == UINT32_MAX) throw construction_bug_error("A~ element outside the kernel");
            e.a_tilde.set(s);
        }
        for (std::size_t lab : bt.ones()) {
            uint32_t s = e.kdec.parent_to_sub[lab];
            if (s == UINT32_MAX) throw construction_bug_error("B~ element outside the kernel");
            e.b_tilde.set(s);
        }
        e.rebuilt = build_code(e.kdec.sub, e.a_tilde, e.b_tilde);
        e.has_2bga = true;
    }
    return e;
}

CssCode EndCycleCode::css() const {
    CssCode c;
    c.hx = hx;
    c.hz = hz;
    c.n = n_tilde;
    c.k = k_tilde;
    return c;
}

int distance_bound_factor(const MorphingProtocol& protocol, int index) {
    Circuit f = protocol.f_circuit(index);
    int c = 0;
    for (uint32_t q : protocol.data_qubits(index)) {
        for (int basis = 0; basis < 2; basis++) {
            PauliBits p(protocol.code.n);
            if (basis) p.x.set(q); else p.z.set(q);
            PauliBits moved = heisenberg_propagate_inverse(f, p);
            c = std::max(c, static_cast<int>(moved.weight()));
        }
    }
    return c;
}

static void add_measure_layer(Circuit& c, const std::vector<MeasureSite>& sites, double p) {
    std::vector<uint32_t> xs, zs;
    for (const auto& s : sites) (s.x_basis ? xs : zs).push_back(s.qubit);
    if (!xs.empty()) c.append(Op::MX, xs, p);
    if (!zs.empty()) c.append(Op::MZ, zs, p);
}

static void add_reset_layer(Circuit& c, const std::vector<MeasureSite>& sites, double p) {
    std::vector<uint32_t> xs, zs;
    for (const auto& s : sites) (s.x_basis ? xs : zs).push_back(s.qubit);
    if (!xs.empty()) {
        c.append(Op::RX, xs);
        if (p > 0) c.append(Op::Z_ERROR, xs, p);  // orthogonal-state preparation
    }
    if (!zs.empty()) {
        c.append(Op::RZ, zs);
        if (p > 0) c.append(Op::X_ERROR, zs, p);
    }
}

static void add_cnot_round(Circuit& c, const CnotRound& round, bool inverted, double p) {
    std::vector<uint32_t> qs;
    for (auto [ctrl, tgt] : round) { qs.push_back(ctrl); qs.push_back(tgt); }
    (void)inverted;  // CX is self-inverse; inversion only reverses round order
    if (qs.empty()) return;
    c.append(Op::CX, qs);
    if (p > 0) c.append(Op::DEPOLARIZE2, qs, p);
}

Circuit qec_round_circuit(const MorphingProtocol& protocol, int start_index,
                          const std::optional<NoiseParams>& noise) {
    double p = noise ? noise->p : 0.0;
    int i = start_index, j = start_index == 1 ? 2 : 1;
    Circuit c;
    c.n_qubits = protocol.code.n;
    add_reset_layer(c, protocol.measure_sites(i), p);
    c.tick();
    for (std::size_t r = protocol.n_rounds; r-- > 0;) {
        add_cnot_round(c, protocol.rounds[i - 1][r], true, p);
        c.tick();
    }
    for (std::size_t r = 0; r < protocol.n_rounds; r++) {
        add_cnot_round(c, protocol.rounds[j - 1][r], false, p);
        c.tick();
    }
    add_measure_layer(c, protocol.measure_sites(j), p);
    c.tick();
    return c;
}

ShiftCircuit shift_automorphism_circuit(const MorphingProtocol& protocol, ShiftType type,
                                        int i, int j) {
    const Group& g = protocol.code.group;
    if (i < 1 || j < 1 || i > static_cast<int>(protocol.a_rest.size()) + 1 ||
        j > static_cast<int>(protocol.a_rest.size()) + 1)
        throw error("shift index out of range");
    auto elem = [&](bool a_side, int idx) {
        if (idx == 1) return a_side ? protocol.a1 : protocol.b1;
        return a_side ? protocol.a_rest[idx - 2] : protocol.b_rest[idx - 2];
    };
    ShiftCircuit out;
    bool a_type = type == ShiftType::A;
    uint32_t ei = elem(a_type, i), ej = elem(a_type, j);
    out.shift_element = g.mul(ei, g.inv(ej));
    out.advances_index = protocol.hom.eval(g, out.shift_element);
    out.circuit.n_qubits = protocol.code.n;
    if (i == j) return out;

    // allowed edges of the connectivity graph
    std::set<std::pair<uint32_t, uint32_t>> edges;
    for (int idx = 0; idx < 2; idx++)
        for (std::size_t r = 0; r < protocol.n_rounds; r++)
            for (auto [c0, t0] : protocol.rounds[idx][r])
                edges.insert({std::min(c0, t0), std::max(c0, t0)});
    auto check_edge = [&](uint32_t a, uint32_t b) {
        if (!edges.count({std::min(a, b), std::max(a, b)}))
            throw connectivity_violation("swap uses a non-edge of the connectivity graph");
    };

    std::size_t l = g.order;
    Circuit& c = out.circuit;
    // step 1: reset right, swap q(L,g) <-> q(R, s1 g)
    uint32_t s1 = a_type ? g.mul(g.inv(ej), protocol.b1) : g.mul(g.inv(protocol.a1), elem(false, i));
    // step 2: reset left, swap q(R,g) <-> q(L, s2 g)
    uint32_t s2 = a_type ? g.mul(ei, g.inv(protocol.b1)) : g.mul(protocol.a1, g.inv(elem(false, j)));

    std::vector<uint32_t> rights(l), lefts(l);
    for (uint32_t e = 0; e < l; e++) { rights[e] = static_cast<uint32_t>(l) + e; lefts[e] = e; }
    c.append(Op::RZ, rights);
    c.tick();
    std::vector<uint32_t> layer_a, layer_b;
    for (uint32_t e = 0; e < l; e++) {
        uint32_t lqb = e, rqb = static_cast<uint32_t>(l) + g.mul(s1, e);
        check_edge(lqb, rqb);
        layer_a.push_back(lqb);
        layer_a.push_back(rqb);
        layer_b.push_back(rqb);
        layer_b.push_back(lqb);
    }
    c.append(Op::CX, layer_a);
    c.tick();
    c.append(Op::CX, layer_b);
    c.tick();
    c.append(Op::RZ, lefts);
    c.tick();
    layer_a.clear();
    layer_b.clear();
    for (uint32_t e = 0; e < l; e++) {
        uint32_t rqb = static_cast<uint32_t>(l) + e, lqb = g.mul(s2, e);
        check_edge(lqb, rqb);
        layer_a.push_back(rqb);
        layer_a.push_back(lqb);
        layer_b.push_back(lqb);
        layer_b.push_back(rqb);
    }
    c.append(Op::CX, layer_a);
    c.tick();
    c.append(Op::CX, layer_b);
    return out;
}

bool midpoint_matches_mid_cycle(const MorphingProtocol& protocol, int index) {
    const BgaCode& code = protocol.code;
    EndCycleCode end = end_cycle_code(protocol, index);
    Circuit f = protocol.f_circuit(index);

    BitMat lhs(0, 2 * code.n);
    auto push = [&](PauliBits p) {
        p = heisenberg_propagate_inverse(f, p);
        BitVec row(2 * code.n);
        for (std::size_t q : p.x.ones()) row.set(q);
        for (std::size_t q : p.z.ones()) row.set(code.n + q);
        lhs.add_row(row);
    };
    for (std::size_t r = 0; r < end.hx.rows; r++) {
        PauliBits p(code.n);
        for (std::size_t lq : end.hx.r[r].ones()) p.x.set(end.qubit_map[lq]);
        push(p);
    }
    for (std::size_t r = 0; r < end.hz.rows; r++) {
        PauliBits p(code.n);
        for (std::size_t lq : end.hz.r[r].ones()) p.z.set(end.qubit_map[lq]);
        push(p);
    }
    for (const auto& s : protocol.measure_sites(index)) {
        PauliBits p(code.n);
        if (s.x_basis) p.x.set(s.qubit); else p.z.set(s.qubit);
        push(p);
    }

    BitMat rhs(0, 2 * code.n);
    for (uint32_t ge = 0; ge < code.group.order; ge++) {
        BitVec rx(2 * code.n), rz(2 * code.n);
        for (std::size_t q : code.hx.r[ge].ones()) rx.set(q);
        for (std::size_t q : code.hz.r[ge].ones()) rz.set(code.n + q);
        rhs.add_row(rx);
        rhs.add_row(rz);
    }
    return same_row_space(lhs, rhs);
}

}  // namespace morphbb
