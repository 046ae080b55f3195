#include "ewan/scenario/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace ewan::scenario {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw LoadError(where + ": '" + text + "' is not a number");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw LoadError(where + ": '" + text + "' is not an integer");
    }
    return v;
}

struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> rows;  ///< raw lines of matrix sections
    int line = 0;
};

/// Binds struct fields to keys in either direction.
class Binder {
  public:
    static Binder writer(std::vector<std::pair<std::string, std::string>>& out) {
        Binder b;
        b.out_ = &out;
        return b;
    }
    static Binder reader(const Section& in) {
        Binder b;
        b.in_ = &in;
        for (const auto& [k, v] : in.entries) {
            if (!b.values_.emplace(k, v).second) throw LoadError("[" + in.name + "]: duplicate key '" + k + "'");
        }
        return b;
    }

    void field(const std::string& key, double& v) {
        if (out_) return put(key, fmt_double(v));
        if (auto s = get(key)) v = parse_double(*s, where(key));
    }
    void field(const std::string& key, int& v) {
        if (out_) return put(key, std::to_string(v));
        if (auto s = get(key)) v = static_cast<int>(parse_int(*s, where(key)));
    }
    void field(const std::string& key, std::uint64_t& v) {
        if (out_) return put(key, std::to_string(v));
        if (auto s = get(key)) v = static_cast<std::uint64_t>(parse_int(*s, where(key)));
    }
    void field(const std::string& key, bool& v) {
        if (out_) return put(key, v ? "true" : "false");
        if (auto s = get(key)) {
            if (*s != "true" && *s != "false") throw LoadError(where(key) + ": expected true or false");
            v = *s == "true";
        }
    }
    void field(const std::string& key, Duration& v) {
        if (out_) return put(key, std::to_string(v.count()));
        if (auto s = get(key)) v = Duration{parse_int(*s, where(key))};
    }
    void field(const std::string& key, std::string& v) {
        if (out_) return put(key, v);
        if (auto s = get(key)) v = *s;
    }
    void field(const std::string& key, radio::Modulation& v) {
        if (out_) return put(key, radio::to_string(v));
        if (auto s = get(key)) {
            try {
                v = radio::parse_modulation(*s);
            } catch (const std::invalid_argument& e) {
                throw LoadError(where(key) + ": " + e.what());
            }
        }
    }
    void field(const std::string& key, TopologyKind& v) {
        if (out_) return put(key, to_string(v));
        if (auto s = get(key)) {
            try {
                v = parse_topology(*s);
            } catch (const std::invalid_argument& e) {
                throw LoadError(where(key) + ": " + e.what());
            }
        }
    }
    void field(const std::string& key, std::vector<int>& v) {
        if (out_) {
            std::string s;
            for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
            return put(key, s);
        }
        if (auto s = get(key)) {
            v.clear();
            std::istringstream is(*s);
            std::string tok;
            while (is >> tok) v.push_back(static_cast<int>(parse_int(tok, where(key))));
        }
    }

    /// Rejects keys nobody consumed.
    void finish() const {
        if (!in_) return;
        for (const auto& [k, v] : values_) {
            if (!used_.count(k)) throw LoadError("[" + in_->name + "]: unknown key '" + k + "'");
        }
    }

  private:
    void put(const std::string& key, const std::string& value) { out_->emplace_back(key, value); }
    std::optional<std::string> get(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }
    std::string where(const std::string& key) const { return "[" + in_->name + "] " + key; }

    std::vector<std::pair<std::string, std::string>>* out_ = nullptr;
    const Section* in_ = nullptr;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

template <typename B>
void bind(B& b, radio::RadioConfig& c) {
    b.field("modulation", c.modulation);
    b.field("spreading_factor", c.spreading_factor);
    b.field("datarate_bps", c.datarate_bps);
    b.field("bandwidth_hz", c.bandwidth_hz);
    b.field("center_frequency_hz", c.center_frequency_hz);
    b.field("tx_power_dbm", c.tx_power_dbm);
    b.field("preamble_length", c.preamble_length);
    b.field("has_crc", c.has_crc);
    b.field("has_header", c.has_header);
    b.field("coding_rate", c.coding_rate);
    b.field("sync_word_bytes", c.sync_word_bytes);
    b.field("sensitivity_dbm", c.sensitivity_dbm);
    b.field("tx_power_w", c.tx_power_w);
    b.field("rx_power_w", c.rx_power_w);
}

template <typename B>
void bind(B& b, protocol::ProtocolParams& p) {
    b.field("period_us", p.period);
    b.field("delta_us", p.delta);
    b.field("p", p.p);
    b.field("m", p.m);
    b.field("max_slots_mh", p.max_slots_mh);
    b.field("max_slots_sh", p.max_slots_sh);
    b.field("flood_hops", p.flood_hops);
    b.field("flood_retx", p.flood_retx);
    b.field("sh_retx_node", p.sh_retx_node);
    b.field("sh_retx_host", p.sh_retx_host);
    b.field("sh_listen_data", p.sh_listen_data);
    b.field("data_payload", p.data_payload);
    b.field("backoff_window_us", p.backoff_window);
    b.field("contention_backoff_exp", p.contention_backoff_exp);
    b.field("flood_guard_us", p.flood_guard);
    b.field("slot_gap_us", p.slot_gap);
    b.field("turnaround_us", p.turnaround);
    b.field("round_wake_us", p.round_wake);
    b.field("schedule_header", p.schedule_header);
    b.field("contention_payload", p.contention_payload);
    b.field("sync_payload", p.sync_payload);
    b.field("large_capacity", p.large_capacity);
    b.field("baseline_start_threshold", p.baseline_start_threshold);
}

template <typename B>
void bind(B& b, energy::EnergyParams& e) {
    b.field("e_boot", e.e_boot);
    b.field("e_com_init", e.e_com_init);
    b.field("p_boot", e.p_boot);
    b.field("p_sleep", e.p_sleep);
    b.field("p_idle", e.p_idle);
    b.field("buck_efficiency", e.buck_efficiency);
    b.field("start_threshold", e.start_threshold);
    b.field("sample_interval_us", e.sample_interval);
    b.field("charge_efficiency", e.charge_efficiency);
    b.field("capacity", e.capacity);
    b.field("capacitance", e.capacitance);
    b.field("initial_energy", e.initial_energy);
}

template <typename B>
void bind(B& b, GenerateSpec& g) {
    b.field("kind", g.kind);
    b.field("rho", g.rho);
    b.field("days", g.days);
    b.field("special_mh_traces", g.special_mh_traces);
    b.field("topology_seed", g.topology_seed);
}

template <typename T>
void write_section(std::ostream& os, const std::string& name, const T& value) {
    std::vector<std::pair<std::string, std::string>> entries;
    auto b = Binder::writer(entries);
    T copy = value;
    bind(b, copy);
    os << "\n[" << name << "]\n";
    for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
}

void write_matrix(std::ostream& os, const std::string& name, const radio::LinkMatrix& m) {
    os << "\n[" << name << "]\n";
    for (int i = 0; i < m.size(); ++i) {
        for (int j = 0; j < m.size(); ++j) os << (j ? " " : "") << fmt_double(m.loss(i, j));
        os << '\n';
    }
}

radio::LinkMatrix read_matrix(const Section& s, int n) {
    if (!s.entries.empty()) throw LoadError("[" + s.name + "]: expected matrix rows, found key = value lines");
    if (static_cast<int>(s.rows.size()) != n) {
        throw LoadError("[" + s.name + "]: expected " + std::to_string(n) + " rows, found " +
                        std::to_string(s.rows.size()));
    }
    std::vector<std::vector<double>> rows;
    for (const auto& line : s.rows) {
        std::istringstream is(line);
        std::vector<double> row;
        std::string tok;
        while (is >> tok) row.push_back(parse_double(tok, "[" + s.name + "]"));
        if (static_cast<int>(row.size()) != n) {
            throw LoadError("[" + s.name + "]: every row needs " + std::to_string(n) + " values");
        }
        rows.push_back(std::move(row));
    }
    radio::LinkMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const double b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (a != b) throw LoadError("[" + s.name + "]: matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            if (j > i) m.set_loss(i, j, a);
        }
    }
    return m;
}

std::vector<Section> parse_sections(std::istream& is, const std::string& file) {
    std::vector<Section> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw LoadError(file + ":" + std::to_string(line_no) + ": malformed section header");
            out.push_back({trim(line.substr(1, line.size() - 2)), {}, {}, line_no});
            continue;
        }
        if (out.empty()) throw LoadError(file + ":" + std::to_string(line_no) + ": content before the first section");
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            out.back().rows.push_back(line);
        } else {
            out.back().entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    return out;
}

std::string trace_file_name(int node) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "node%02d.csv", node);
    return buf;
}

}  // namespace

void write_trace_csv(const fs::path& path, const energy::HarvestTrace& trace) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "time_s,power_w\n";
    const double res = sim::to_seconds(trace.resolution());
    const auto& p = trace.samples();
    for (std::size_t k = 0; k < p.size(); ++k) {
        os << fmt_double(static_cast<double>(k) * res) << ',' << fmt_double(p[k]) << '\n';
    }
}

energy::HarvestTrace read_trace_csv(const fs::path& path, Duration resolution) {
    std::ifstream is(path);
    if (!is) throw LoadError("missing trace file " + path.string());
    std::string line;
    if (!std::getline(is, line) || trim(line) != "time_s,power_w") {
        throw LoadError(path.string() + ": expected header 'time_s,power_w'");
    }
    const double res = sim::to_seconds(resolution);
    std::vector<double> power;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos) throw LoadError(where + ": expected two columns");
        const double t = parse_double(trim(line.substr(0, comma)), where);
        const double p = parse_double(trim(line.substr(comma + 1)), where);
        if (std::abs(t - static_cast<double>(power.size()) * res) > 1e-6) {
            throw LoadError(where + ": time does not follow the trace resolution");
        }
        if (!(p >= 0.0)) throw LoadError(where + ": harvested power must be non-negative");
        power.push_back(p);
    }
    return energy::HarvestTrace(resolution, std::move(power));
}

void save_scenario(const Scenario& s, const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path trace_dir = path.stem().string() + "_traces";
    const Duration resolution = s.traces.empty() ? sim::seconds(60) : s.traces.front().resolution();
    for (const auto& t : s.traces) {
        if (t.resolution() != resolution) throw std::invalid_argument("all traces must share one resolution");
    }

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# ewan scenario v1\n";
    {
        std::vector<std::pair<std::string, std::string>> entries;
        auto b = Binder::writer(entries);
        Scenario copy = s;
        b.field("name", copy.name);
        b.field("kind", copy.kind);
        b.field("n_nodes", copy.n_nodes);
        b.field("horizon_us", copy.horizon);
        b.field("ramp_width_db", copy.ramp_width_db);
        b.field("capture_sigma_db", copy.capture_sigma_db);
        b.field("bottleneck_nodes", copy.bottleneck_nodes);
        os << "\n[scenario]\n";
        for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
    }
    if (s.generate) write_section(os, "generate", *s.generate);
    write_section(os, "radio.bootstrap", s.bootstrap);
    write_section(os, "radio.single_hop", s.single_hop);
    write_section(os, "radio.multi_hop", s.multi_hop);
    write_section(os, "protocol", s.protocol);
    write_section(os, "energy", s.energy);
    for (std::size_t i = 0; i < s.node_energy.size(); ++i) {
        write_section(os, "energy.node." + std::to_string(i + 1), s.node_energy[i]);
    }
    write_matrix(os, "links_short", s.links_short);
    write_matrix(os, "links_long", s.links_long);
    os << "\n[traces]\nresolution_us = " << resolution.count() << '\n';
    for (std::size_t i = 0; i < s.traces.size(); ++i) {
        const fs::path rel = trace_dir / trace_file_name(static_cast<int>(i + 1));
        os << "node." << i + 1 << " = " << rel.generic_string() << '\n';
        write_trace_csv(path.parent_path() / rel, s.traces[i]);
    }
    if (!os) throw std::runtime_error("error writing " + path.string());
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw LoadError("cannot open scenario file " + path.string());
    const auto sections = parse_sections(is, path.string());

    std::map<std::string, const Section*> by_name;
    for (const auto& sec : sections) {
        if (!by_name.emplace(sec.name, &sec).second) throw LoadError("duplicate section [" + sec.name + "]");
    }
    const auto need = [&](const std::string& name) -> const Section& {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw LoadError(path.string() + ": missing section [" + name + "]");
        return *it->second;
    };

    Scenario s;
    std::set<std::string> seen;
    {
        auto b = Binder::reader(need("scenario"));
        b.field("name", s.name);
        b.field("kind", s.kind);
        b.field("n_nodes", s.n_nodes);
        b.field("horizon_us", s.horizon);
        b.field("ramp_width_db", s.ramp_width_db);
        b.field("capture_sigma_db", s.capture_sigma_db);
        b.field("bottleneck_nodes", s.bottleneck_nodes);
        b.finish();
        seen.insert("scenario");
    }
    if (s.n_nodes < 1) throw LoadError("[scenario] n_nodes must be at least 1");
    const auto read_into = [&](const std::string& name, auto& target) {
        auto it = by_name.find(name);
        if (it == by_name.end()) return false;
        auto b = Binder::reader(*it->second);
        bind(b, target);
        b.finish();
        seen.insert(name);
        return true;
    };
    GenerateSpec gen;
    if (read_into("generate", gen)) s.generate = gen;
    read_into("radio.bootstrap", s.bootstrap);
    read_into("radio.single_hop", s.single_hop);
    read_into("radio.multi_hop", s.multi_hop);
    read_into("protocol", s.protocol);
    read_into("energy", s.energy);
    for (int i = 1; i <= s.n_nodes; ++i) {
        energy::EnergyParams e = s.energy;
        if (read_into("energy.node." + std::to_string(i), e)) {
            if (static_cast<int>(s.node_energy.size()) != i - 1) {
                throw LoadError("per-node energy sections must cover nodes 1.." + std::to_string(s.n_nodes));
            }
            s.node_energy.push_back(e);
        }
    }
    if (!s.node_energy.empty() && static_cast<int>(s.node_energy.size()) != s.n_nodes) {
        throw LoadError("per-node energy sections must cover nodes 1.." + std::to_string(s.n_nodes));
    }

    s.links_short = read_matrix(need("links_short"), s.n_nodes + 1);
    s.links_long = read_matrix(need("links_long"), s.n_nodes + 1);
    seen.insert("links_short");
    seen.insert("links_long");

    {
        const Section& sec = need("traces");
        auto b = Binder::reader(sec);
        Duration resolution = sim::seconds(60);
        b.field("resolution_us", resolution);
        if (resolution <= Duration::zero()) throw LoadError("[traces] resolution_us must be positive");
        for (int i = 1; i <= s.n_nodes; ++i) {
            std::string rel;
            b.field("node." + std::to_string(i), rel);
            if (rel.empty()) throw LoadError("[traces]: no trace for node " + std::to_string(i));
            s.traces.push_back(read_trace_csv(path.parent_path() / rel, resolution));
        }
        b.finish();
        seen.insert("traces");
    }
    for (const auto& sec : sections) {
        if (!seen.count(sec.name)) throw LoadError("unknown section [" + sec.name + "]");
    }

    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    return s;
}

}  // namespace ewan::scenario
