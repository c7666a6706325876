#include "frame.hpp"

#include <cstdio>
#include <cstring>

namespace morphbb {

void ShotRecords::init(std::size_t n_shots, std::size_t dets, std::size_t obs) {
    shots = n_shots;
    n_detectors = dets;
    n_observables = obs;
    det_stride = (dets + 63) / 64;
    obs_stride = (obs + 63) / 64;
    det_bits.assign(shots * det_stride, 0);
    obs_bits.assign(shots * obs_stride, 0);
}

static constexpr char kRecordMagic[8] = {'M', 'B', 'B', 'D', 'E', 'T', '0', '1'};

void ShotRecords::write_file(const std::string& path) const {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw error("cannot open " + path + " for writing");
    uint64_t header[4] = {0, shots, n_detectors, n_observables};
    std::memcpy(header, kRecordMagic, 8);
    std::fwrite(header, sizeof header, 1, f);
    if (!det_bits.empty()) std::fwrite(det_bits.data(), 8, det_bits.size(), f);
    if (!obs_bits.empty()) std::fwrite(obs_bits.data(), 8, obs_bits.size(), f);
    std::fclose(f);
}

ShotRecords ShotRecords::read_file(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw error("cannot open " + path);
    uint64_t header[4];
    if (std::fread(header, sizeof header, 1, f) != 1) { std::fclose(f); throw parse_error("truncated record file"); }
    if (std::memcmp(header, kRecordMagic, 8) != 0) { std::fclose(f); throw parse_error("bad record file magic"); }
    ShotRecords r;
    r.init(header[1], header[2], header[3]);
    if (!r.det_bits.empty() && std::fread(r.det_bits.data(), 8, r.det_bits.size(), f) != r.det_bits.size()) {
        std::fclose(f);
        throw parse_error("truncated detector block");
    }
    if (!r.obs_bits.empty() && std::fread(r.obs_bits.data(), 8, r.obs_bits.size(), f) != r.obs_bits.size()) {
        std::fclose(f);
        throw parse_error("truncated observable block");
    }
    std::fclose(f);
    return r;
}

std::vector<FaultSite> enumerate_fault_sites(const Circuit& c) {
    std::vector<FaultSite> out;
    for (std::size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& ins = c.instructions[i];
        switch (ins.op) {
            case Op::X_ERROR:
            case Op::Z_ERROR:
                if (ins.p > 0)
                    for (std::size_t s = 0; s < ins.qubits.size(); s++)
                        out.push_back({i, s, 0, ins.p});
                break;
            case Op::DEPOLARIZE2:
                if (ins.p > 0)
                    for (std::size_t s = 0; s + 1 < ins.qubits.size(); s += 2)
                        for (int comp = 1; comp < 16; comp++)
                            out.push_back({i, s, comp, ins.p / 15.0});
                break;
            case Op::MX:
            case Op::MZ:
                if (ins.p > 0)
                    for (std::size_t s = 0; s < ins.qubits.size(); s++)
                        out.push_back({i, s, 0, ins.p});
                break;
            default:
                break;
        }
    }
    return out;
}

namespace {

struct Frame {
    BitVec x, z;
    bool live = false;  // false while the frame is still all-zero

    explicit Frame(std::size_t n) : x(n), z(n) {}
    void cx(uint32_t c, uint32_t t) {
        if (!live) return;
        if (x.get(c)) x.flip(t);
        if (z.get(t)) z.flip(c);
    }
    void inject_x(uint32_t q) { x.flip(q); live = true; }
    void inject_z(uint32_t q) { z.flip(q); live = true; }
};

}  // namespace

void frame_run(const Circuit& c, Rng* rng, const FaultSite* inject,
               std::vector<uint8_t>& meas_flips, BitVec& det_flips, BitVec& obs_flips) {
    Frame f(c.n_qubits);
    meas_flips.assign(c.count_measurements(), 0);
    std::size_t rec = 0, det = 0;
    for (std::size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& ins = c.instructions[i];
        bool injected_here = inject && inject->instr == i;
        switch (ins.op) {
            case Op::CX:
                for (std::size_t j = 0; j + 1 < ins.qubits.size(); j += 2)
                    f.cx(ins.qubits[j], ins.qubits[j + 1]);
                break;
            case Op::X_ERROR:
                if (injected_here) f.inject_x(ins.qubits[inject->slot]);
                if (rng && ins.p > 0)
                    for (uint32_t q : ins.qubits)
                        if (rng->bernoulli(ins.p)) f.inject_x(q);
                break;
            case Op::Z_ERROR:
                if (injected_here) f.inject_z(ins.qubits[inject->slot]);
                if (rng && ins.p > 0)
                    for (uint32_t q : ins.qubits)
                        if (rng->bernoulli(ins.p)) f.inject_z(q);
                break;
            case Op::DEPOLARIZE2:
                if (injected_here) {
                    int comp = inject->component;
                    uint32_t a = ins.qubits[inject->slot], b = ins.qubits[inject->slot + 1];
                    if (comp & 4) f.inject_x(a);
                    if (comp & 8) f.inject_z(a);
                    if (comp & 1) f.inject_x(b);
                    if (comp & 2) f.inject_z(b);
                }
                if (rng && ins.p > 0)
                    for (std::size_t j = 0; j + 1 < ins.qubits.size(); j += 2)
                        if (rng->bernoulli(ins.p)) {
                            int comp = 1 + static_cast<int>(rng->below(15));
                            uint32_t a = ins.qubits[j], b = ins.qubits[j + 1];
                            if (comp & 4) f.inject_x(a);
                            if (comp & 8) f.inject_z(a);
                            if (comp & 1) f.inject_x(b);
                            if (comp & 2) f.inject_z(b);
                        }
                break;
            case Op::MX:
                for (std::size_t s = 0; s < ins.qubits.size(); s++) {
                    uint32_t q = ins.qubits[s];
                    uint8_t flip = f.live && f.z.get(q);
                    if (injected_here && inject->slot == s) flip ^= 1;
                    if (rng && ins.p > 0 && rng->bernoulli(ins.p)) flip ^= 1;
                    meas_flips[rec++] = flip;
                    if (f.live) f.x.set(q, false);  // phase-type frame lost at collapse
                }
                break;
            case Op::MZ:
                for (std::size_t s = 0; s < ins.qubits.size(); s++) {
                    uint32_t q = ins.qubits[s];
                    uint8_t flip = f.live && f.x.get(q);
                    if (injected_here && inject->slot == s) flip ^= 1;
                    if (rng && ins.p > 0 && rng->bernoulli(ins.p)) flip ^= 1;
                    meas_flips[rec++] = flip;
                    if (f.live) f.z.set(q, false);
                }
                break;
            case Op::RX:
            case Op::RZ:
                if (f.live)
                    for (uint32_t q : ins.qubits) { f.x.set(q, false); f.z.set(q, false); }
                break;
            case Op::DETECTOR: {
                uint8_t bit = 0;
                for (int32_t rref : ins.recs) bit ^= meas_flips[rec + rref];
                if (bit) det_flips.set(det);
                det++;
                break;
            }
            case Op::OBSERVABLE_INCLUDE: {
                uint8_t bit = 0;
                for (int32_t rref : ins.recs) bit ^= meas_flips[rec + rref];
                if (bit) obs_flips.flip(static_cast<std::size_t>(ins.index));
                break;
            }
            case Op::TICK:
                break;
        }
    }
}

ShotRecords sample_shots(const Circuit& c, std::size_t shots, uint64_t seed, unsigned threads) {
    ShotRecords out;
    out.init(shots, c.count_detectors(), c.count_observables());
    unsigned nt = resolve_thread_count(static_cast<int>(threads));
    parallel_for(shots, nt, [&](std::size_t shot) {
        Rng rng = Rng::for_shot(seed, shot);
        std::vector<uint8_t> meas;
        BitVec det(out.n_detectors), obs(out.n_observables);
        frame_run(c, &rng, nullptr, meas, det, obs);
        for (std::size_t d : det.ones()) out.set_det(shot, d);
        for (std::size_t o : obs.ones()) out.set_obs(shot, o);
    });
    return out;
}

}  // namespace morphbb
