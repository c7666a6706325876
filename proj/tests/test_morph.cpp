#include "doctest.h"

#include <set>

#include "morph.hpp"
#include "specs.hpp"
#include "tableau.hpp"
#include "util.hpp"

using namespace morphbb;

namespace {

Homomorphism hom_by_name(const Group& g, const std::string& name) {
    for (const auto& h : find_homomorphisms(g))
        if (h.name(g) == name) return h;
    throw std::runtime_error("no hom " + name);
}

std::vector<Homomorphism> criterion1_homs(const BgaCode& code) {
    std::vector<Homomorphism> out;
    for (const auto& h : find_homomorphisms(code.group)) {
        try {
            contracting_sets(code, h);
            out.push_back(h);
        } catch (const criterion_failure&) {
        }
    }
    return out;
}

}  // namespace

TEST_CASE("contracting_sets picks a1 and b1 from the homomorphism") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;

    ContractingSets fx = contracting_sets(c, hom_by_name(g, "f_x"));
    CHECK(fx.a1 == g.parse_element("x^3"));
    CHECK(fx.b1 == g.parse_element("x"));

    ContractingSets fxy = contracting_sets(c, hom_by_name(g, "f_xy"));
    CHECK(fxy.a1 == g.parse_element("y^2"));
    CHECK(fxy.b1 == g.parse_element("x^2"));

    // coset structure: G_X1 and G_X2 partition G, likewise for Z
    GroupSubset all = fx.gx1;
    all.xor_in(fx.gx2);
    CHECK(all.popcount() == g.order);
    CHECK(fx.gx1.popcount() == g.order / 2);

    BgaCode c90 = builtin_code("bb90");
    CHECK(find_homomorphisms(c90.group).empty());
    CHECK(criterion1_homs(c90).empty());
}

TEST_CASE("homomorphism column of the code table") {
    auto names_of = [&](const char* code) {
        BgaCode c = builtin_code(code);
        std::set<std::string> names;
        for (const auto& h : criterion1_homs(c)) names.insert(h.name(c.group));
        return names;
    };
    std::set<std::string> all3 = {"f_x", "f_y", "f_xy"};
    CHECK(names_of("bb72") == all3);
    CHECK(names_of("bb90") == std::set<std::string>{});
    CHECK(names_of("bb108") == std::set<std::string>{"f_y"});
    CHECK(names_of("bb144") == all3);
    CHECK(names_of("bb288") == all3);
    CHECK(names_of("bb360") == all3);
    CHECK(names_of("bb756") == std::set<std::string>{"f_y"});
}

TEST_CASE("contract criteria hold for the coset construction and fail for G_X1 = G") {
    BgaCode c = builtin_code("bb72");
    for (const auto& h : criterion1_homs(c)) {
        ContractingSets s = contracting_sets(c, h);
        CriteriaReport rep = check_contract_criteria(c, s);
        CHECK(rep.all_ok());
    }
    ContractingSets bad = contracting_sets(c, hom_by_name(c.group, "f_x"));
    GroupSubset everything(c.group.order);
    for (uint32_t e = 0; e < c.group.order; e++) everything.set(e);
    bad.gx1 = everything;
    CriteriaReport rep = check_contract_criteria(c, bad);
    CHECK(!rep.x_ok);
    CHECK(!rep.first_counterexample.empty());

    // single-stabilizer sets: no overlapping contracting stabilizers
    ContractingSets tiny = contracting_sets(c, hom_by_name(c.group, "f_x"));
    const Group& g = c.group;
    tiny.gx1 = g.subset_of({0});
    tiny.gx2 = g.subset_of({g.parse_element("x")});
    tiny.gz1 = g.subset_of({g.parse_element("y^3")});
    tiny.gz2 = g.subset_of({g.parse_element("x^3*y^3")});
    CHECK(check_contract_criteria(c, tiny).all_ok());
}

TEST_CASE("protocol gate counts for bb72") {
    BgaCode c = builtin_code("bb72");
    MorphingProtocol p = build_protocol(c, hom_by_name(c.group, "f_x"), Variant::standard);
    CHECK(p.n_rounds == 3);
    for (int i = 0; i < 2; i++)
        for (int r = 0; r < 3; r++) CHECK(p.rounds[i][r].size() == 36);
    CHECK(p.measure_sites(1).size() == 36);
    CHECK(p.measure_sites(2).size() == 36);
    // M_1 bases: X on a1 b1 K sites, Z on a1 b1 K^c
    const Group& g = c.group;
    GroupSubset xk = g.shift(p.kernel, g.mul(p.a1, p.b1));
    for (const auto& s : p.measure_sites(1)) {
        uint32_t e = s.qubit - static_cast<uint32_t>(g.order);
        CHECK(s.x_basis == xk.get(e));
    }
}

TEST_CASE("verify_contraction passes for every builtin protocol and variant") {
    for (const char* name : {"bb72", "bb108", "bb144", "bb288", "toric_d4", "code422"}) {
        BgaCode c = builtin_code(name);
        for (const auto& h : criterion1_homs(c)) {
            for (Variant v : {Variant::standard, Variant::reverse_round3, Variant::reverse_round2}) {
                if (v == Variant::reverse_round2 && c.a_order.size() != 3) continue;
                MorphingProtocol p = build_protocol(c, h, v);
                VerifyReport rep = verify_contraction(p);
                INFO(name, " ", h.name(c.group), " ", variant_name(v), ": ", rep.detail);
                CHECK(rep.ok);
            }
        }
    }
}

TEST_CASE("verify_contraction catches a flipped round-1 CNOT") {
    BgaCode c = builtin_code("bb72");
    MorphingProtocol p = build_protocol(c, hom_by_name(c.group, "f_x"), Variant::standard);
    std::swap(p.rounds[0][0][0].first, p.rounds[0][0][0].second);
    VerifyReport rep = verify_contraction(p);
    CHECK(!rep.ok);
    CHECK(rep.detail.find("s(") != std::string::npos);
}

TEST_CASE("[[4,2,2]] protocol contracts with end-cycle rank 0") {
    BgaCode c = builtin_code("code422");
    auto homs = criterion1_homs(c);
    REQUIRE(homs.size() == 1);
    MorphingProtocol p = build_protocol(c, homs[0], Variant::standard);
    VerifyReport rep = verify_contraction(p);
    CHECK(rep.ok);
    CHECK(rep.end_cycle_rank[0] == 0);  // AB = 0, so no end-cycle stabilizers
    CHECK(rep.end_cycle_rank[1] == 0);
}

TEST_CASE("toric protocol has two CNOT rounds per contraction") {
    BgaCode c = builtin_code("toric_d4");
    MorphingProtocol p = build_protocol(c, hom_by_name(c.group, "f_xy"), Variant::standard);
    CHECK(p.n_rounds == 2);
    CHECK(verify_contraction(p).ok);
}

TEST_CASE("end-cycle code parameters") {
    struct Row {
        const char* name;
        std::size_t n_t, k_t;
        int d_t;
    };
    for (Row row : {Row{"bb72", 36, 12, 3}, Row{"bb144", 72, 12, 6}}) {
        BgaCode c = builtin_code(row.name);
        for (const auto& h : criterion1_homs(c)) {
            MorphingProtocol p = build_protocol(c, h, Variant::standard);
            EndCycleCode e = end_cycle_code(p, 1);
            CHECK(e.n_tilde == row.n_t);
            CHECK(e.k_tilde == row.k_t);
            REQUIRE(e.has_2bga);
            CHECK(e.rebuilt.n == row.n_t);
            CHECK(e.rebuilt.k == row.k_t);
            if (row.d_t <= 3) {
                CHECK(distance_exact(e.rebuilt, row.d_t) == row.d_t);
            }
        }
    }
    // [[288,12,18]] -> [[144,12,12]] parameters (distance checked elsewhere)
    BgaCode c288 = builtin_code("bb288");
    MorphingProtocol p = build_protocol(c288, hom_by_name(c288.group, "f_xy"), Variant::standard);
    EndCycleCode e = end_cycle_code(p, 1);
    CHECK(e.n_tilde == 144);
    CHECK(e.k_tilde == 12);
}

TEST_CASE("as_2bga round-trip: rebuilt stabilizer group equals the end-cycle group") {
    for (const char* name : {"bb72", "toric_d4"}) {
        BgaCode c = builtin_code(name);
        for (const auto& h : criterion1_homs(c)) {
            for (int index : {1, 2}) {
                MorphingProtocol p = build_protocol(c, h, Variant::standard);
                EndCycleCode e = end_cycle_code(p, index);
                REQUIRE(e.has_2bga);
                CHECK(same_row_space(e.rebuilt.hx, e.hx));
                CHECK(same_row_space(e.rebuilt.hz, e.hz));
            }
        }
    }
}

TEST_CASE("reverse_round3 end-cycle equals standard up to the qubit swap") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_x");
    MorphingProtocol std_p = build_protocol(c, h, Variant::standard);
    MorphingProtocol rev_p = build_protocol(c, h, Variant::reverse_round3);
    EndCycleCode es = end_cycle_code(std_p, 1);
    EndCycleCode er = end_cycle_code(rev_p, 1);
    CHECK(!es.on_right);
    CHECK(er.on_right);
    // identical generators in the local block ordering
    CHECK(same_row_space(es.hx, er.hx));
    CHECK(same_row_space(es.hz, er.hz));
    // and the global supports are related by q(L,a1 g) <-> q(R,b1 g)
    uint32_t shift = g.mul(g.inv(std_p.a1), std_p.b1);
    for (std::size_t i = 0; i < es.x_gen_support.size(); i++)
        CHECK(er.x_gen_support[i] == g.shift(es.x_gen_support[i], shift));
}

TEST_CASE("C2 tilde equals C1 tilde shifted by any element of K^c") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    for (const auto& h : criterion1_homs(c)) {
        MorphingProtocol p = build_protocol(c, h, Variant::standard);
        EndCycleCode e1 = end_cycle_code(p, 1);
        EndCycleCode e2 = end_cycle_code(p, 2);
        for (uint32_t r : {e1.relabel_r, static_cast<uint32_t>(p.cokernel.ones().back())}) {
            BitMat shifted(0, c.n);
            for (const auto& s : e1.x_gen_support) {
                BitVec row(c.n);
                for (std::size_t e : g.shift(s, r).ones()) row.set(e);
                shifted.add_row(row);
            }
            BitMat e2rows(0, c.n);
            for (const auto& s : e2.x_gen_support) {
                BitVec row(c.n);
                for (std::size_t e : s.ones()) row.set(e);
                e2rows.add_row(row);
            }
            CHECK(same_row_space(shifted, e2rows));
        }
    }
}

TEST_CASE("propagation of stabilizers and logicals to the end-cycle code") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);

    // contracting stabilizer s(X,g), g in a1 K -> X(0,0)
    uint32_t gc = static_cast<uint32_t>(p.sets.gx1.first_set());
    PauliOperator zero = propagate_logical_mid_to_end(p, 1, c.x_stabilizer(gc));
    CHECK(!zero.x_left.any());
    CHECK(!zero.x_right.any());

    // expanding stabilizer -> X(b1^-1 A B g, 0)
    uint32_t ge = static_cast<uint32_t>(p.sets.gx2.first_set());
    PauliOperator exp = propagate_logical_mid_to_end(p, 1, c.x_stabilizer(ge));
    GroupSubset want = g.shift(g.algebra_mul(c.A, c.B), g.mul(g.inv(p.b1), ge));
    CHECK(exp.x_left == want);
    CHECK(want.popcount() == 9);  // generic weight nine

    // left-only logical unchanged
    LogicalBasis basis = logical_basis(c);
    GroupSubset left_supp(g.order);
    PauliOperator left_only = PauliOperator::x_op(basis.x[0].x_left, GroupSubset(g.order));
    if (!basis.x[0].x_right.any()) {
        PauliOperator out = propagate_logical_mid_to_end(p, 1, left_only);
        CHECK(out.x_left == basis.x[0].x_left);
    }

    // non-logical input rejected
    GroupSubset single(g.order);
    single.set(0);
    CHECK_THROWS_AS(propagate_logical_mid_to_end(p, 1, PauliOperator::x_op(single, GroupSubset(g.order))),
                    not_a_logical_error);
}

TEST_CASE("end-cycle logical condition (ABP in a1 b1 K^c) holds for propagated logicals") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_xy");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);
    LogicalBasis basis = logical_basis(c);
    GroupSubset coset = g.shift(p.cokernel, g.mul(p.a1, p.b1));
    for (const auto& x : basis.x) {
        PauliOperator end = propagate_logical_mid_to_end(p, 1, x);
        GroupSubset abp = g.algebra_mul(g.algebra_mul(c.A, c.B), end.x_left);
        for (std::size_t e : abp.ones()) CHECK(coset.get(e));
    }
}

TEST_CASE("end-cycle operator on left-even qubits maps to left-odd through a QEC round") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);
    LogicalBasis basis = logical_basis(c);
    Circuit f1 = p.f_circuit(1);
    for (const auto& x : basis.x) {
        PauliOperator end1 = propagate_logical_mid_to_end(p, 1, x);
        GroupSubset even_part = end1.x_left;
        bool all_even = true;
        for (std::size_t e : even_part.ones())
            if (!p.kernel.get(e)) { all_even = false; break; }
        if (!all_even || !even_part.any()) continue;
        // pull back to the mid-cycle code, then push to the other end-cycle code
        PauliBits pb(c.n);
        for (std::size_t e : even_part.ones()) pb.x.set(e);
        PauliBits mid = heisenberg_propagate_inverse(f1, pb);
        GroupSubset mp(g.order), mq(g.order);
        for (std::size_t q : mid.x.ones()) {
            if (q < g.order) mp.set(q); else mq.set(q - g.order);
        }
        PauliOperator end2 = propagate_logical_mid_to_end(p, 2, PauliOperator::x_op(mp, mq));
        for (std::size_t e : end2.x_left.ones()) CHECK(p.cokernel.get(e));
    }
}

TEST_CASE("distance bound factor") {
    BgaCode c = builtin_code("bb72");
    for (const auto& h : criterion1_homs(c)) {
        MorphingProtocol p = build_protocol(c, h, Variant::standard);
        CHECK(distance_bound_factor(p, 1) == 3);
        CHECK(distance_bound_factor(p, 2) == 3);
    }
    BgaCode t = builtin_code("toric_d4");
    MorphingProtocol tp = build_protocol(t, hom_by_name(t.group, "f_xy"), Variant::standard);
    CHECK(distance_bound_factor(tp, 1) == 2);
}

TEST_CASE("qec round circuit structure and determinism") {
    BgaCode c = builtin_code("bb72");
    Homomorphism h = hom_by_name(c.group, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);
    Circuit round = qec_round_circuit(p, 1, std::nullopt);
    round.validate();
    CHECK(round.cx_layer_count() == 6);

    Circuit noisy = qec_round_circuit(p, 1, NoiseParams{1e-3});
    noisy.validate();
    CHECK(noisy.cx_layer_count() == 6);

    // noiseless round from a C1~ codestate: all M2 outcomes deterministic
    EndCycleCode e = end_cycle_code(p, 1);
    TableauSim sim(c.n, round.count_measurements(), c.n);
    for (std::size_t r = 0; r < e.hx.rows; r++) {
        PauliBits pb(c.n);
        for (std::size_t lq : e.hx.r[r].ones()) pb.x.set(e.qubit_map[lq]);
        sim.seed_row(pb);
    }
    for (std::size_t r = 0; r < e.hz.rows; r++) {
        PauliBits pb(c.n);
        for (std::size_t lq : e.hz.r[r].ones()) pb.z.set(e.qubit_map[lq]);
        sim.seed_row(pb);
    }
    sim.run(round);
    REQUIRE(sim.outcomes().size() == 36);
    for (const auto& o : sim.outcomes()) CHECK(o.deterministic());
}

TEST_CASE("midpoint group equals the mid-cycle code") {
    for (const char* name : {"bb72", "toric_d4"}) {
        BgaCode c = builtin_code(name);
        for (const auto& h : criterion1_homs(c)) {
            for (Variant v : {Variant::standard, Variant::reverse_round3}) {
                MorphingProtocol p = build_protocol(c, h, v);
                CHECK(midpoint_matches_mid_cycle(p, 1));
                CHECK(midpoint_matches_mid_cycle(p, 2));
            }
        }
    }
}

TEST_CASE("k preservation and distance bound across builtin protocols") {
    BgaCode c = builtin_code("bb72");
    Homomorphism h = hom_by_name(c.group, "f_y");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);
    EndCycleCode e = end_cycle_code(p, 1);
    CHECK(e.k_tilde == c.k);
    // d~ >= d / c_i with d = 6, c = 3, and the observed d~ >= d/2
    CHECK(distance_exact(e.rebuilt, 3) == 3);
}

TEST_CASE("reverse_round2 end-cycle generators match the closed form and weight bound") {
    BgaCode c = build_code_named({6, 6}, {"x^3", "y", "y^2"}, {"x", "x^2", "y^3"});
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::reverse_round2);
    CHECK(verify_contraction(p).ok);
    EndCycleCode e = end_cycle_code(p, 1);

    uint32_t a1 = p.a1, a2 = p.a_rest[0], a3 = p.a_rest[1];
    uint32_t b1 = p.b1, b2 = p.b_rest[0], b3 = p.b_rest[1];
    // S_X = a3 b1^-1 B + b2^-1 (a1 + a2)(a1^-1 b3 (a2 + a3) + b1 + b2);
    // the b3 factor is required for consistency with the round-table circuit
    // (direct conjugation below) and with the weight-11 propagation map.
    GroupSubset inner = g.subset_of({g.mul(g.mul(g.inv(a1), b3), a2),
                                     g.mul(g.mul(g.inv(a1), b3), a3), b1, b2});
    GroupSubset lead = g.subset_of({g.mul(g.inv(b2), a1), g.mul(g.inv(b2), a2)});
    GroupSubset sx = g.algebra_mul(lead, inner);
    sx.xor_in(g.shift(c.B, g.mul(a3, g.inv(b1))));
    Circuit f1 = p.f_circuit(1);
    std::size_t gi = 0;
    for (std::size_t ge : p.sets.gx2.ones()) {
        GroupSubset want = g.shift(sx, static_cast<uint32_t>(ge));
        CHECK(e.x_gen_support[gi] == want);
        CHECK(e.x_gen_support[gi].popcount() <= 11);
        // direct circuit conjugation, restricted to the unmeasured qubits
        PauliBits pb(c.n);
        for (std::size_t q : g.shift(c.A, static_cast<uint32_t>(ge)).ones()) pb.x.set(q);
        for (std::size_t q : g.shift(c.B, static_cast<uint32_t>(ge)).ones()) pb.x.set(g.order + q);
        PauliBits prop = heisenberg_propagate(f1, pb);
        GroupSubset left(g.order);
        for (std::size_t q : prop.x.ones())
            if (q < g.order) left.set(q);
        CHECK(left == want);
        gi++;
    }
    // S_Z = a1 b3^-1 A^-1 + a2 (b1^-1 + b2^-1)(a1^-1 + a2^-1 + a3^-1 b1 (b2^-1 + b3^-1))
    GroupSubset inner_z = g.subset_of({g.inv(a1), g.inv(a2),
                                       g.mul(g.mul(g.inv(a3), b1), g.inv(b2)),
                                       g.mul(g.mul(g.inv(a3), b1), g.inv(b3))});
    GroupSubset lead_z = g.subset_of({g.mul(a2, g.inv(b1)), g.mul(a2, g.inv(b2))});
    GroupSubset sz = g.algebra_mul(lead_z, inner_z);
    sz.xor_in(g.shift(g.inverse_set(c.A), g.mul(a1, g.inv(b3))));
    gi = 0;
    for (std::size_t ge : p.sets.gz2.ones()) {
        GroupSubset want = g.shift(sz, static_cast<uint32_t>(ge));
        CHECK(e.z_gen_support[gi] == want);
        CHECK(e.z_gen_support[gi].popcount() <= 11);
        gi++;
    }
}

TEST_CASE("Table VII instance: reverse_round2 on (6,6) f_x gives [[36,12,4]]") {
    BgaCode c = build_code_named({6, 6}, {"x^3", "y", "y^2"}, {"x", "x^2", "y^3"});
    Homomorphism h = hom_by_name(c.group, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::reverse_round2);
    EndCycleCode e = end_cycle_code(p, 1);
    CHECK(e.n_tilde == 36);
    CHECK(e.k_tilde == 12);
    CHECK(distance_exact_css(e.css(), 4, static_cast<long>(e.kdec.sub.order)) == 4);
}

TEST_CASE("shift automorphism circuits") {
    BgaCode c = builtin_code("bb72");
    const Group& g = c.group;
    Homomorphism h = hom_by_name(g, "f_x");
    MorphingProtocol p = build_protocol(c, h, Variant::standard);

    ShiftCircuit ident = shift_automorphism_circuit(p, ShiftType::A, 2, 2);
    CHECK(ident.circuit.instructions.empty());

    ShiftCircuit sc = shift_automorphism_circuit(p, ShiftType::A, 2, 1);
    sc.circuit.validate();
    CHECK(sc.shift_element == g.mul(p.a_rest[0], g.inv(p.a1)));
    CHECK(sc.advances_index == h.eval(g, sc.shift_element));

    // conjugating an end-cycle stabilizer through the circuit multiplies its
    // labels by a_i a_j^-1
    EndCycleCode e = end_cycle_code(p, 1);
    TableauSim sim(c.n, sc.circuit.count_measurements() + 1, c.n);
    for (std::size_t r = 0; r < e.hx.rows; r++) {
        PauliBits pb(c.n);
        for (std::size_t lq : e.hx.r[r].ones()) pb.x.set(e.qubit_map[lq]);
        sim.seed_row(pb);
    }
    for (std::size_t r = 0; r < e.hz.rows; r++) {
        PauliBits pb(c.n);
        for (std::size_t lq : e.hz.r[r].ones()) pb.z.set(e.qubit_map[lq]);
        sim.seed_row(pb);
    }
    PauliBits first(c.n);
    for (std::size_t lq : e.hx.r[0].ones()) first.x.set(e.qubit_map[lq]);
    std::size_t tr = sim.track(first);
    sim.run(sc.circuit);
    PauliBits moved = sim.tracked_pauli(tr);
    PauliBits want(c.n);
    for (std::size_t lq : e.hx.r[0].ones()) {
        uint32_t lab = static_cast<uint32_t>(e.qubit_map[lq]);  // left-qubit labels
        want.x.set(g.mul(sc.shift_element, lab));
    }
    CHECK(moved == want);
}
