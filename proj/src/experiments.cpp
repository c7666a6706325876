#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cmath>

#include "util.hpp"

namespace morphbb {

MemoryKind parse_memory_kind(const std::string& s) {
    if (s == "z_memory") return MemoryKind::z_memory;
    if (s == "x_memory") return MemoryKind::x_memory;
    if (s == "bell_memory" || s == "bell") return MemoryKind::bell_memory;
    throw parse_error("unknown memory kind '" + s + "'");
}

const char* memory_kind_name(MemoryKind k) {
    switch (k) {
        case MemoryKind::z_memory: return "z_memory";
        case MemoryKind::x_memory: return "x_memory";
        case MemoryKind::bell_memory: return "bell_memory";
    }
    return "?";
}

namespace {

struct AnnotationPlan {
    std::vector<std::vector<uint32_t>> detectors;             // each: sorted record list
    std::vector<std::pair<int64_t, std::vector<uint32_t>>> observables;
};

std::vector<uint32_t> sym_diff(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Any XOR of deterministic relations is again a deterministic relation, so we
// are free to pick a sparser basis; sparse detectors make a much better
// decoding graph than the raw Gaussian-elimination relations.
void sparsify_annotations(AnnotationPlan& plan) {
    for (auto& d : plan.detectors) std::sort(d.begin(), d.end());
    for (auto& [idx, o] : plan.observables) std::sort(o.begin(), o.end());
    bool changed = true;
    for (int pass = 0; pass < 8 && changed; pass++) {
        changed = false;
        for (std::size_t i = 0; i < plan.detectors.size(); i++) {
            for (std::size_t j = 0; j < plan.detectors.size(); j++) {
                if (i == j || plan.detectors[j].empty()) continue;
                std::vector<uint32_t> cand = sym_diff(plan.detectors[i], plan.detectors[j]);
                if (!cand.empty() && cand.size() < plan.detectors[i].size()) {
                    plan.detectors[i] = std::move(cand);
                    changed = true;
                }
            }
        }
    }
    for (auto& [idx, o] : plan.observables) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (const auto& d : plan.detectors) {
                if (d.empty()) continue;
                std::vector<uint32_t> cand = sym_diff(o, d);
                if (cand.size() < o.size()) {
                    o = std::move(cand);
                    improved = true;
                }
            }
        }
    }
}

// Second-phase basis improvement: greedily XOR detectors into each other to
// minimize how many elementary faults touch each one, which is what the
// decoding graph's sparsity actually depends on. The observables are reduced
// against the final detector basis the same way.
void improve_detector_basis_impl(Circuit& c, unsigned threads) {
    std::size_t tail = c.instructions.size();
    while (tail > 0 && (c.instructions[tail - 1].op == Op::DETECTOR ||
                        c.instructions[tail - 1].op == Op::OBSERVABLE_INCLUDE))
        tail--;
    std::vector<FaultSite> sites = enumerate_fault_sites(c);
    if (sites.empty()) return;
    std::size_t n_meas = c.count_measurements();

    // per-record fault incidence
    std::vector<BitVec> incidence(n_meas, BitVec(sites.size()));
    {
        std::vector<std::vector<uint8_t>> flips(sites.size());
        parallel_for(sites.size(), resolve_thread_count(static_cast<int>(threads)), [&](std::size_t i) {
            BitVec det(c.count_detectors()), obs(c.count_observables());
            frame_run(c, nullptr, &sites[i], flips[i], det, obs);
        });
        for (std::size_t i = 0; i < sites.size(); i++)
            for (std::size_t m = 0; m < n_meas; m++)
                if (flips[i][m]) incidence[m].set(i);
    }

    struct Ann {
        Instruction ins;
        BitVec faults;
        std::vector<uint32_t> records;
    };
    std::vector<Ann> dets, obs;
    for (std::size_t i = tail; i < c.instructions.size(); i++) {
        Ann a;
        a.ins = c.instructions[i];
        a.faults = BitVec(sites.size());
        for (int32_t r : a.ins.recs) {
            uint32_t rec = static_cast<uint32_t>(static_cast<int64_t>(n_meas) + r);
            a.records.push_back(rec);
            a.faults.xor_in(incidence[rec]);
        }
        std::sort(a.records.begin(), a.records.end());
        (a.ins.op == Op::DETECTOR ? dets : obs).push_back(std::move(a));
    }

    auto merge_into = [](Ann& dst, const Ann& src) {
        dst.faults.xor_in(src.faults);
        std::vector<uint32_t> merged;
        std::set_symmetric_difference(dst.records.begin(), dst.records.end(), src.records.begin(),
                                      src.records.end(), std::back_inserter(merged));
        dst.records = std::move(merged);
    };
    bool changed = true;
    for (int pass = 0; pass < 10 && changed; pass++) {
        changed = false;
        for (std::size_t i = 0; i < dets.size(); i++) {
            std::size_t wi = dets[i].faults.popcount();
            for (std::size_t j = 0; j < dets.size(); j++) {
                if (i == j) continue;
                BitVec cand = dets[i].faults;
                cand.xor_in(dets[j].faults);
                std::size_t wc = cand.popcount();
                if (wc < wi && wc > 0) {
                    merge_into(dets[i], dets[j]);
                    wi = wc;
                    changed = true;
                }
            }
        }
    }
    for (auto& o : obs) {
        bool improved = true;
        while (improved) {
            improved = false;
            std::size_t wo = o.faults.popcount();
            for (const auto& d : dets) {
                BitVec cand = o.faults;
                cand.xor_in(d.faults);
                if (cand.popcount() < wo) {
                    merge_into(o, d);
                    wo = cand.popcount();
                    improved = true;
                }
            }
        }
    }

    c.instructions.resize(tail);
    std::sort(dets.begin(), dets.end(), [](const Ann& a, const Ann& b) {
        uint32_t ma = a.records.empty() ? 0 : a.records.back();
        uint32_t mb = b.records.empty() ? 0 : b.records.back();
        if (ma != mb) return ma < mb;
        return a.records < b.records;
    });
    auto to_recs = [&](const std::vector<uint32_t>& records) {
        std::vector<int32_t> recs;
        for (uint32_t t : records)
            recs.push_back(static_cast<int32_t>(static_cast<int64_t>(t) - static_cast<int64_t>(n_meas)));
        return recs;
    };
    for (const auto& d : dets) c.detector(to_recs(d.records));
    for (const auto& o : obs) c.observable(o.ins.index, to_recs(o.records));
}

void append_annotations(Circuit& c, const AnnotationPlan& plan) {
    std::size_t total = c.count_measurements();
    auto to_recs = [&](const std::vector<uint32_t>& records) {
        std::vector<int32_t> recs;
        for (uint32_t t : records)
            recs.push_back(static_cast<int32_t>(static_cast<int64_t>(t) - static_cast<int64_t>(total)));
        std::sort(recs.begin(), recs.end());
        return recs;
    };
    std::vector<std::vector<uint32_t>> dets = plan.detectors;
    std::sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
        uint32_t ma = a.empty() ? 0 : *std::max_element(a.begin(), a.end());
        uint32_t mb = b.empty() ? 0 : *std::max_element(b.begin(), b.end());
        if (ma != mb) return ma < mb;
        return a < b;
    });
    for (const auto& d : dets) c.detector(to_recs(d));
    for (const auto& [idx, records] : plan.observables) c.observable(idx, to_recs(records));
}

PauliBits pauli_from_end_row(const EndCycleCode& end, const BitVec& row, bool x_type,
                             std::size_t n_qubits) {
    PauliBits p(n_qubits);
    for (std::size_t lq : row.ones()) {
        std::size_t q = end.qubit_map[lq];
        if (x_type) p.x.set(q); else p.z.set(q);
    }
    return p;
}

std::vector<uint32_t> expr_records(const OutcomeExpr& e) { return e.records; }

}  // namespace

void improve_detector_basis(Circuit& c, unsigned threads) { improve_detector_basis_impl(c, threads); }

Circuit memory_experiment(const MorphingProtocol& protocol, MemoryKind kind, int rounds,
                          const std::optional<NoiseParams>& noise,
                          bool logical_as_detector, int logical_index) {
    if (rounds < 1) throw error("rounds must be >= 1");
    const BgaCode& code = protocol.code;
    double p = noise ? noise->p : 0.0;
    EndCycleCode end1 = end_cycle_code(protocol, 1);
    int final_index = rounds % 2 == 0 ? 1 : 2;
    EndCycleCode endf = end_cycle_code(protocol, final_index);
    std::vector<uint32_t> data = protocol.data_qubits(1);
    std::size_t k = code.k;
    CssLogicals logs1 = css_logical_basis(end1.css());

    bool bell = kind == MemoryKind::bell_memory;
    bool zmem = kind == MemoryKind::z_memory;
    std::size_t n_code = code.n;
    std::size_t n_qubits = bell ? n_code + k + 1 : n_code;
    uint32_t anc = static_cast<uint32_t>(n_code + k);

    Circuit c;
    c.n_qubits = n_qubits;
    c.qubit_labels.resize(n_qubits);
    for (uint32_t e = 0; e < code.group.order; e++) {
        c.qubit_labels[e] = "L:" + code.group.element_name(e);
        c.qubit_labels[code.group.order + e] = "R:" + code.group.element_name(e);
    }
    if (bell) {
        for (std::size_t i = 0; i < k; i++) c.qubit_labels[n_code + i] = "ref" + std::to_string(i);
        c.qubit_labels[anc] = "anc";
    }

    // ---- preparation layer ----
    std::vector<PauliBits> tracked_ops;  // logical operators tracked through the rounds
    if (bell) {
        // CSS joint state: X stabilizer rows of C~1 plus X_i Xref_i pairs
        BitMat xrows(0, n_code + k);
        for (std::size_t r = 0; r < end1.hx.rows; r++) {
            BitVec row(n_code + k);
            for (std::size_t lq : end1.hx.r[r].ones()) row.set(end1.qubit_map[lq]);
            xrows.add_row(row);
        }
        for (std::size_t i = 0; i < k; i++) {
            BitVec row(n_code + k);
            for (std::size_t lq : logs1.x[i].ones()) row.set(end1.qubit_map[lq]);
            row.set(n_code + i);
            xrows.add_row(row);
        }
        std::vector<std::size_t> pivots = rref(xrows);
        std::vector<uint8_t> is_pivot(n_code + k, 0);
        for (std::size_t pcol : pivots) is_pivot[pcol] = 1;
        std::vector<uint32_t> rx, rz;
        for (uint32_t q = 0; q < n_code + k; q++) (is_pivot[q] ? rx : rz).push_back(q);
        rz.push_back(anc);
        if (!rx.empty()) c.append(Op::RX, rx);
        c.append(Op::RZ, rz);
        c.tick();
        for (std::size_t r = 0; r < pivots.size(); r++) {
            uint32_t pivot = static_cast<uint32_t>(pivots[r]);
            for (std::size_t q : xrows.r[r].ones())
                if (q != pivots[r]) c.cx(pivot, static_cast<uint32_t>(q));
        }
        c.tick();
        for (std::size_t i = 0; i < k; i++) {
            PauliBits px(n_qubits);
            for (std::size_t lq : logs1.x[i].ones()) px.x.set(end1.qubit_map[lq]);
            px.x.set(n_code + i);
            tracked_ops.push_back(px);
        }
        for (std::size_t i = 0; i < k; i++) {
            PauliBits pz(n_qubits);
            for (std::size_t lq : logs1.z[i].ones()) pz.z.set(end1.qubit_map[lq]);
            pz.z.set(n_code + i);
            tracked_ops.push_back(pz);
        }
    } else {
        c.append(zmem ? Op::RZ : Op::RX, data);
        if (p > 0) c.append(zmem ? Op::X_ERROR : Op::Z_ERROR, data, p);
        c.tick();
        std::size_t count = logical_index < 0 ? k : 1;
        for (std::size_t ii = 0; ii < count; ii++) {
            std::size_t i = logical_index < 0 ? ii : static_cast<std::size_t>(logical_index);
            PauliBits op(n_qubits);
            const BitVec& rep = zmem ? logs1.z[i] : logs1.x[i];
            for (std::size_t lq : rep.ones()) {
                if (zmem) op.z.set(end1.qubit_map[lq]);
                else op.x.set(end1.qubit_map[lq]);
            }
            tracked_ops.push_back(op);
        }
    }
    std::size_t prep_end = c.instructions.size();

    // ---- noisy QEC rounds ----
    for (int r = 0; r < rounds; r++) {
        Circuit round = qec_round_circuit(protocol, (r % 2) + 1, noise);
        for (const auto& ins : round.instructions) c.instructions.push_back(ins);
    }

    // ---- final readout ----
    std::size_t first_logical_record = SIZE_MAX;
    std::vector<PauliBits> tracked_final;

    if (bell) {
        // tracking pass to locate the final logical representatives
        TableauSim trk(n_qubits, c.count_measurements() + 4 * n_code, 4 * n_qubits);
        trk.run(c, 0, prep_end);
        std::vector<std::size_t> ids;
        for (const auto& op : tracked_ops) ids.push_back(trk.track(op));
        trk.run(c, prep_end, c.instructions.size());
        for (std::size_t id : ids) tracked_final.push_back(trk.tracked_pauli(id));

        auto mpp = [&](const PauliBits& op) {
            bool x_type = op.x.any();
            if (x_type && op.z.any()) throw construction_bug_error("mixed MPP operator");
            c.append(x_type ? Op::RX : Op::RZ, {anc});
            for (std::size_t q : (x_type ? op.x : op.z).ones()) {
                if (x_type) c.cx(anc, static_cast<uint32_t>(q));
                else c.cx(static_cast<uint32_t>(q), anc);
            }
            c.append(x_type ? Op::MX : Op::MZ, {anc});
        };
        c.tick();
        for (std::size_t r = 0; r < endf.hx.rows; r++)
            mpp(pauli_from_end_row(endf, endf.hx.r[r], true, n_qubits));
        for (std::size_t r = 0; r < endf.hz.rows; r++)
            mpp(pauli_from_end_row(endf, endf.hz.r[r], false, n_qubits));
        first_logical_record = c.count_measurements();
        for (const auto& op : tracked_final) mpp(op);
    } else {
        c.append(zmem ? Op::MZ : Op::MX, data, p);
    }

    // ---- pass A: detector discovery over the stabilizer-only mixed state ----
    AnnotationPlan plan;
    {
        TableauSim sim(n_qubits, c.count_measurements(), 4 * n_qubits);
        if (bell || !zmem) {
            for (std::size_t r = 0; r < end1.hx.rows; r++)
                sim.seed_row(pauli_from_end_row(end1, end1.hx.r[r], true, n_qubits));
        }
        if (bell || zmem) {
            for (std::size_t r = 0; r < end1.hz.rows; r++)
                sim.seed_row(pauli_from_end_row(end1, end1.hz.r[r], false, n_qubits));
        }
        sim.run(c, prep_end, c.instructions.size());
        const auto& outs = sim.outcomes();
        std::size_t base = c.count_measurements() - outs.size();  // records before prep_end: none
        for (std::size_t t = 0; t < outs.size(); t++) {
            std::size_t record = base + t;
            if (bell && record >= first_logical_record) continue;  // logical MPPs are observables
            if (!outs[t].deterministic()) continue;
            std::vector<uint32_t> refs = expr_records(outs[t]);
            refs.push_back(static_cast<uint32_t>(record));
            plan.detectors.push_back(std::move(refs));
        }
    }

    // ---- pass B: physical pass for the observable reference sets ----
    {
        TableauSim sim(n_qubits, c.count_measurements(), 4 * n_qubits);
        sim.run(c, 0, prep_end);
        std::vector<std::size_t> ids;
        for (const auto& op : tracked_ops) ids.push_back(sim.track(op));
        sim.run(c, prep_end, c.instructions.size());
        if (bell) {
            for (std::size_t i = 0; i < tracked_final.size(); i++) {
                OutcomeExpr e = sim.outcomes()[first_logical_record + i];
                if (!e.deterministic())
                    throw construction_bug_error("logical observable is not deterministic");
                std::vector<uint32_t> refs = expr_records(e);
                refs.push_back(static_cast<uint32_t>(first_logical_record + i));
                plan.observables.push_back({static_cast<int64_t>(i), std::move(refs)});
            }
        } else {
            for (std::size_t i = 0; i < ids.size(); i++) {
                // the final transversal measurement reduces the tracked logical
                // to pure sign content: its records are the observable refs
                if (!sim.tracked_pauli(ids[i]).identity())
                    throw construction_bug_error("tracked logical not fully measured");
                OutcomeExpr sign = sim.tracked_sign(ids[i]);
                if (!sign.deterministic())
                    throw construction_bug_error("logical byproduct depends on a discarded bit");
                std::vector<uint32_t> refs = expr_records(sign);
                if (logical_as_detector) plan.detectors.push_back(std::move(refs));
                else plan.observables.push_back({static_cast<int64_t>(i), std::move(refs)});
            }
        }
    }

    sparsify_annotations(plan);
    append_annotations(c, plan);
    if (p > 0) improve_detector_basis(c);
    c.validate();
    return c;
}

Circuit insert_probe_noise(const Circuit& c, double p, bool x_errors, std::size_t n_code_qubits) {
    Circuit out;
    out.n_qubits = c.n_qubits;
    out.qubit_labels = c.qubit_labels;
    std::vector<uint32_t> all;
    for (uint32_t q = 0; q < n_code_qubits; q++) all.push_back(q);
    for (const auto& ins : c.instructions) {
        out.instructions.push_back(ins);
        if (ins.op == Op::TICK)
            out.instructions.push_back({x_errors ? Op::X_ERROR : Op::Z_ERROR, p, -1, all, {}});
    }
    return out;
}

CircuitDistanceResult circuit_distance_upper(const MorphingProtocol& protocol, char side,
                                             const DecoderConfig* config_override,
                                             unsigned threads) {
    if (side != 'X' && side != 'Z') throw error("side must be 'X' or 'Z'");
    bool zside = side == 'Z';  // X faults probed against the Z logicals
    MemoryKind kind = zside ? MemoryKind::z_memory : MemoryKind::x_memory;
    Circuit core = memory_experiment(protocol, kind, 1, std::nullopt, false, -1);
    Circuit probed = insert_probe_noise(core, 1e-4, zside, protocol.code.n);
    improve_detector_basis(probed, threads);
    DetectorErrorModel dem = enumerate_faults_dem(probed, threads);

    DecoderConfig config;
    config.bp_method = BpMethod::product_sum;
    config.max_iterations = 100;
    config.osd_method = OsdMethod::osd_cs;
    config.osd_order = 100;
    if (config_override) config = *config_override;

    std::vector<double> priors = priors_from_dem(dem);
    std::vector<double> prior_llr(priors.size());
    for (std::size_t f = 0; f < priors.size(); f++)
        prior_llr[f] = std::log((1 - priors[f]) / priors[f]);

    // Trial 0 is the plain BP+OSD pass. The deterministic BP ordering ties
    // large blocks of equally-suspect faults, which systematically hides the
    // lightest solutions, so further trials rerun the same OSD over seeded
    // information-set orderings. Every trial returns a syndrome-satisfying
    // correction, so the minimum remains a certified upper bound.
    const int trials = 192;
    CircuitDistanceResult res;
    res.per_logical.assign(protocol.code.k, 0);
    parallel_for(protocol.code.k, resolve_thread_count(static_cast<int>(threads)), [&](std::size_t i) {
        SparseBinary h = SparseBinary::from_dem(dem, static_cast<long>(i));
        BitVec syndrome(h.rows);
        syndrome.set(h.rows - 1);
        DecodeResult r0 = bposd_decode(h, priors, syndrome, config);
        std::size_t best = r0.weight;
        std::vector<double> rel(h.cols);
        for (int t = 1; t < trials; t++) {
            for (std::size_t f = 0; f < h.cols; f++)
                rel[f] = static_cast<double>(
                             splitmix64((static_cast<uint64_t>(i) << 32) ^
                                        (static_cast<uint64_t>(t) * 0x9e3779b97f4a7c15ULL) ^ f)) /
                         static_cast<double>(UINT64_MAX);
            DecodeResult r = osd_postprocess(h, rel, prior_llr, syndrome, config.osd_method,
                                             config.osd_order);
            best = std::min(best, r.weight);
        }
        res.per_logical[i] = static_cast<int>(best);
    });
    res.bound = *std::min_element(res.per_logical.begin(), res.per_logical.end());
    return res;
}

int circuit_distance_upper_both(const MorphingProtocol& protocol,
                                const DecoderConfig* config_override, unsigned threads) {
    CircuitDistanceResult z = circuit_distance_upper(protocol, 'Z', config_override, threads);
    CircuitDistanceResult x = circuit_distance_upper(protocol, 'X', config_override, threads);
    return std::min(z.bound, x.bound);
}

std::size_t decode_shots(const DetectorErrorModel& dem, const ShotRecords& records,
                         const DecoderConfig& config, unsigned threads) {
    SparseBinary h = SparseBinary::from_dem(dem, -1);
    std::vector<double> priors = priors_from_dem(dem);
    std::vector<BitVec> fault_obs(dem.faults.size(), BitVec(dem.n_observables));
    for (std::size_t f = 0; f < dem.faults.size(); f++)
        for (uint32_t o : dem.faults[f].observables) fault_obs[f].set(o);

    std::atomic<std::size_t> failures{0};
    parallel_for(records.shots, resolve_thread_count(static_cast<int>(threads)), [&](std::size_t s) {
        BitVec syndrome(dem.n_detectors);
        for (std::size_t d = 0; d < dem.n_detectors; d++)
            if (records.det(s, d)) syndrome.set(d);
        DecodeResult r = bposd_decode(h, priors, syndrome, config);
        BitVec predicted(dem.n_observables);
        for (uint32_t f : r.correction) predicted.xor_in(fault_obs[f]);
        bool fail = false;
        for (std::size_t o = 0; o < dem.n_observables; o++)
            if (predicted.get(o) != records.obs(s, o)) { fail = true; break; }
        if (fail) failures.fetch_add(1);
    });
    return failures.load();
}

WilsonInterval wilson95(std::size_t failures, std::size_t shots) {
    WilsonInterval w;
    if (shots == 0) return w;
    double z = 1.959963984540054;
    double n = static_cast<double>(shots);
    double phat = static_cast<double>(failures) / n;
    double denom = 1 + z * z / n;
    double center = (phat + z * z / (2 * n)) / denom;
    double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
    w.low = failures == 0 ? 0.0 : std::max(0.0, center - half);
    w.high = failures == shots ? 1.0 : std::min(1.0, center + half);
    return w;
}

LogicalErrorResult logical_error_rate(const MorphingProtocol& protocol, MemoryKind kind,
                                      int rounds, double p, std::size_t shots,
                                      const DecoderConfig& config, uint64_t seed,
                                      unsigned threads) {
    if (shots < 1) throw error("shots must be >= 1");
    Circuit c = memory_experiment(protocol, kind, rounds, NoiseParams{p}, false, -1);
    DetectorErrorModel dem = enumerate_faults_dem(c, threads);
    ShotRecords rec = sample_shots(c, shots, seed, threads);
    std::size_t failures = decode_shots(dem, rec, config, threads);
    LogicalErrorResult res;
    res.shots = shots;
    res.failures = failures;
    res.rate = static_cast<double>(failures) / static_cast<double>(shots);
    WilsonInterval w = wilson95(failures, shots);
    res.ci_low = w.low;
    res.ci_high = w.high;
    return res;
}

double two_fault_leading_estimate(const DetectorErrorModel& dem, const DecoderConfig& config,
                                  std::size_t samples, uint64_t seed, unsigned threads) {
    std::size_t nf = dem.faults.size();
    if (nf < 2) return 0;
    double s1 = 0, s2 = 0;
    for (const auto& f : dem.faults) { s1 += f.p; s2 += f.p * f.p; }
    double pair_mass = (s1 * s1 - s2) / 2;

    // cumulative distribution for sampling faults proportional to p
    std::vector<double> cum(nf);
    double acc = 0;
    for (std::size_t f = 0; f < nf; f++) { acc += dem.faults[f].p; cum[f] = acc; }
    auto draw = [&](Rng& rng) {
        double u = rng.uniform() * s1;
        return static_cast<std::size_t>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    };

    SparseBinary h = SparseBinary::from_dem(dem, -1);
    std::vector<double> priors = priors_from_dem(dem);
    std::vector<BitVec> fault_obs(nf, BitVec(dem.n_observables));
    std::vector<BitVec> fault_det(nf, BitVec(dem.n_detectors));
    for (std::size_t f = 0; f < nf; f++) {
        for (uint32_t o : dem.faults[f].observables) fault_obs[f].set(o);
        for (uint32_t d : dem.faults[f].detectors) fault_det[f].set(d);
    }

    std::atomic<std::size_t> fails{0};
    parallel_for(samples, resolve_thread_count(static_cast<int>(threads)), [&](std::size_t s) {
        Rng rng = Rng::for_shot(seed ^ 0x9d2c5680aull, s);
        std::size_t f = draw(rng), g = draw(rng);
        while (g == f) g = draw(rng);
        BitVec syndrome = fault_det[f];
        syndrome.xor_in(fault_det[g]);
        DecodeResult r = bposd_decode(h, priors, syndrome, config);
        BitVec predicted(dem.n_observables);
        for (uint32_t cf : r.correction) predicted.xor_in(fault_obs[cf]);
        BitVec actual = fault_obs[f];
        actual.xor_in(fault_obs[g]);
        if (!(predicted == actual)) fails.fetch_add(1);
    });
    double fail_frac = static_cast<double>(fails.load()) / static_cast<double>(samples);
    return pair_mass * std::exp(-s1) * fail_frac;
}

}  // namespace morphbb
