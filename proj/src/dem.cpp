#include "dem.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "util.hpp"

namespace morphbb {

std::string DetectorErrorModel::to_text() const {
    std::ostringstream out;
    out << "# detectors " << n_detectors << "\n# observables " << n_observables << "\n";
    char buf[40];
    for (const auto& f : faults) {
        std::snprintf(buf, sizeof buf, "%.12g", f.p);
        out << "error(" << buf << ")";
        for (uint32_t d : f.detectors) out << " D" << d;
        for (uint32_t o : f.observables) out << " L" << o;
        out << "\n";
    }
    return out.str();
}

DetectorErrorModel DetectorErrorModel::from_text(const std::string& text) {
    DetectorErrorModel dem;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t i = 0;
        while (i < line.size() && isspace(static_cast<unsigned char>(line[i]))) i++;
        if (i >= line.size()) continue;
        if (line[i] == '#') {
            std::istringstream cs(line.substr(i + 1));
            std::string word;
            std::size_t v;
            if (cs >> word >> v) {
                if (word == "detectors") dem.n_detectors = v;
                else if (word == "observables") dem.n_observables = v;
            }
            continue;
        }
        if (line.compare(i, 6, "error(") != 0) throw parse_error("bad DEM line: " + line);
        std::size_t close = line.find(')', i);
        if (close == std::string::npos) throw parse_error("bad DEM line: " + line);
        DemFault f;
        f.p = std::stod(line.substr(i + 6, close - i - 6));
        std::istringstream rest(line.substr(close + 1));
        std::string tok;
        while (rest >> tok) {
            if (tok[0] == 'D') f.detectors.push_back(static_cast<uint32_t>(std::stoul(tok.substr(1))));
            else if (tok[0] == 'L') f.observables.push_back(static_cast<uint32_t>(std::stoul(tok.substr(1))));
            else throw parse_error("bad DEM token: " + tok);
        }
        dem.n_detectors = std::max<std::size_t>(dem.n_detectors,
            f.detectors.empty() ? 0 : *std::max_element(f.detectors.begin(), f.detectors.end()) + 1);
        dem.n_observables = std::max<std::size_t>(dem.n_observables,
            f.observables.empty() ? 0 : *std::max_element(f.observables.begin(), f.observables.end()) + 1);
        dem.faults.push_back(std::move(f));
    }
    return dem;
}

DetectorErrorModel enumerate_faults_dem(const Circuit& c, unsigned threads) {
    std::vector<FaultSite> sites = enumerate_fault_sites(c);
    std::size_t n_det = c.count_detectors();
    std::size_t n_obs = c.count_observables();

    std::vector<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>> sigs(sites.size());
    unsigned nt = resolve_thread_count(static_cast<int>(threads));
    parallel_for(sites.size(), nt, [&](std::size_t i) {
        std::vector<uint8_t> meas;
        BitVec det(n_det), obs(n_obs);
        frame_run(c, nullptr, &sites[i], meas, det, obs);
        for (std::size_t d : det.ones()) sigs[i].first.push_back(static_cast<uint32_t>(d));
        for (std::size_t o : obs.ones()) sigs[i].second.push_back(static_cast<uint32_t>(o));
    });

    // merge identical signatures: p' = p1 (1-p2) + p2 (1-p1)
    std::map<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>, double> merged;
    for (std::size_t i = 0; i < sites.size(); i++) {
        if (sigs[i].first.empty() && sigs[i].second.empty()) continue;  // no effect
        auto [it, fresh] = merged.emplace(sigs[i], sites[i].p);
        if (!fresh) {
            double p1 = it->second, p2 = sites[i].p;
            it->second = p1 * (1 - p2) + p2 * (1 - p1);
        }
    }

    DetectorErrorModel dem;
    dem.n_detectors = n_det;
    dem.n_observables = n_obs;
    for (const auto& [sig, p] : merged)
        dem.faults.push_back({p, sig.first, sig.second});
    return dem;
}

ShotRecords dem_sample_shots(const DetectorErrorModel& dem, std::size_t shots, uint64_t seed,
                             unsigned threads) {
    ShotRecords out;
    out.init(shots, dem.n_detectors, dem.n_observables);
    unsigned nt = resolve_thread_count(static_cast<int>(threads));
    parallel_for(shots, nt, [&](std::size_t shot) {
        Rng rng = Rng::for_shot(seed, shot);
        BitVec det(dem.n_detectors), obs(dem.n_observables);
        for (const auto& f : dem.faults) {
            if (!rng.bernoulli(f.p)) continue;
            for (uint32_t d : f.detectors) det.flip(d);
            for (uint32_t o : f.observables) obs.flip(o);
        }
        for (std::size_t d : det.ones()) out.set_det(shot, d);
        for (std::size_t o : obs.ones()) out.set_obs(shot, o);
    });
    return out;
}

}  // namespace morphbb
