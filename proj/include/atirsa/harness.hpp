#pragma once

// Experiment orchestration: configuration files, sweeps with replications,
// CSV output, figure data and the comparison table.

#include "analytic.hpp"
#include "core.hpp"
#include "sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace atirsa
{
    struct ExperimentSpec
    {
        // Regular degree-3 unless the file says otherwise.
        SimConfig base = [] {
            SimConfig c;
            c.distribution = DegreeDistribution::regular(3);
            return c;
        }();
        std::uint64_t measured_frames = 200000;
        std::optional<std::uint64_t> warmup; // default_warmup() per point when unset
        std::vector<std::uint32_t> sweep_num_users;
        std::vector<std::uint32_t> sweep_frame_slots;
        std::vector<double> sweep_target_load;
        std::uint32_t replications = 1;
        std::filesystem::path output_path;
        bool analytic = false;
        std::uint64_t ps_trials = 10000;
        unsigned threads = 0;
    };

    struct ResultRecord
    {
        Protocol protocol = Protocol::Irsa;
        std::uint32_t num_users = 0;
        std::uint32_t frame_slots = 0;
        double target_load = 0.0;
        std::uint64_t seed = 0;
        std::size_t point = 0;
        std::uint32_t replication = 0;
        std::uint64_t measured_frames = 0;
        double throughput = 0.0;
        double avg_network_aoi = 0.0;
        double normalized_aoi = 0.0;
        double realized_load = 0.0;
        double ps_estimate = 0.0;
        std::optional<double> analytic_ps;
        std::optional<double> analytic_aoi;
        double wall_time_seconds = 0.0;
    };

    inline std::string format_number(double v)
    {
        if (std::isinf(v))
        {
            return v > 0 ? "inf" : "-inf";
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    // ---- configuration -------------------------------------------------

    namespace detail
    {
        inline std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        template <typename T>
        T parse_value(const std::string &key, const std::string &text)
        {
            std::istringstream is(text);
            T v{};
            is >> v;
            if (!is || !(is >> std::ws).eof())
            {
                throw std::invalid_argument("config: bad value for '" + key + "': '" + text + "'");
            }
            return v;
        }

        template <typename T>
        std::vector<T> parse_list(const std::string &key, const std::string &text)
        {
            std::vector<T> out;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                out.push_back(parse_value<T>(key, trim(item)));
            }
            if (out.empty())
            {
                throw std::invalid_argument("config: empty list for '" + key + "'");
            }
            return out;
        }
    }

    /// Applies one `key = value` setting. Unknown keys are errors.
    inline void apply_setting(ExperimentSpec &spec, const std::string &key, const std::string &value)
    {
        using detail::parse_list;
        using detail::parse_value;
        if (key == "protocol")
            spec.base.protocol = parse_protocol(value);
        else if (key == "num_users")
            spec.base.num_users = parse_value<std::uint32_t>(key, value);
        else if (key == "frame_slots")
            spec.base.frame_slots = parse_value<std::uint32_t>(key, value);
        else if (key == "target_load")
            spec.base.target_load = parse_value<double>(key, value);
        else if (key == "distribution")
            spec.base.distribution = parse_distribution(value);
        else if (key == "frames")
            spec.measured_frames = parse_value<std::uint64_t>(key, value);
        else if (key == "warmup")
            spec.warmup = parse_value<std::uint64_t>(key, value);
        else if (key == "seed")
            spec.base.seed = parse_value<std::uint64_t>(key, value);
        else if (key == "replications")
            spec.replications = parse_value<std::uint32_t>(key, value);
        else if (key == "output_path")
            spec.output_path = value;
        else if (key == "analytic")
            spec.analytic = value == "true" || value == "1" || value == "yes";
        else if (key == "ps_trials")
            spec.ps_trials = parse_value<std::uint64_t>(key, value);
        else if (key == "threads")
            spec.threads = parse_value<unsigned>(key, value);
        else if (key == "sweep.num_users")
            spec.sweep_num_users = parse_list<std::uint32_t>(key, value);
        else if (key == "sweep.frame_slots")
            spec.sweep_frame_slots = parse_list<std::uint32_t>(key, value);
        else if (key == "sweep.target_load")
            spec.sweep_target_load = parse_list<double>(key, value);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    /// Flat `key = value` text; `#` starts a comment.
    inline ExperimentSpec parse_experiment(std::istream &in, ExperimentSpec spec = {})
    {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const std::string t = detail::trim(line);
            if (t.empty())
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
            apply_setting(spec, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
        }
        return spec;
    }

    inline ExperimentSpec load_experiment(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file " + path.string());
        return parse_experiment(in);
    }

    struct SweepPoint
    {
        std::uint32_t num_users = 0;
        std::uint32_t frame_slots = 0;
        double target_load = 0.0;
    };

    /// Cartesian product with num_users outermost, then frame_slots, then target_load.
    inline std::vector<SweepPoint> sweep_points(const ExperimentSpec &spec)
    {
        const auto users = spec.sweep_num_users.empty() ? std::vector<std::uint32_t>{spec.base.num_users} : spec.sweep_num_users;
        const auto slots = spec.sweep_frame_slots.empty() ? std::vector<std::uint32_t>{spec.base.frame_slots} : spec.sweep_frame_slots;
        const auto loads = spec.sweep_target_load.empty() ? std::vector<double>{spec.base.target_load} : spec.sweep_target_load;
        std::vector<SweepPoint> pts;
        for (auto u : users)
            for (auto m : slots)
                for (auto g : loads)
                    pts.push_back({u, m, g});
        return pts;
    }

    inline SimConfig config_for(const ExperimentSpec &spec, const SweepPoint &pt, std::uint32_t replication, std::size_t point_index)
    {
        SimConfig c = spec.base;
        c.num_users = pt.num_users;
        c.frame_slots = pt.frame_slots;
        c.target_load = pt.target_load;
        std::uint64_t warmup = 0;
        if (spec.warmup)
            warmup = *spec.warmup;
        else if (c.protocol == Protocol::SlottedAloha)
            warmup = default_warmup(c.num_users, 1, 1.0);
        else
            warmup = default_warmup(c.num_users, c.frame_slots, c.target_load);
        c.warmup_frames = warmup;
        c.total_frames = warmup + spec.measured_frames;
        c.seed = derive_seed(spec.base.seed, {point_index, replication});
        validate_config(c);
        return c;
    }

    inline void validate_experiment(const ExperimentSpec &spec)
    {
        if (spec.replications < 1)
            throw std::invalid_argument("experiment: replications must be >= 1");
        if (spec.measured_frames < 1)
            throw std::invalid_argument("experiment: frames must be >= 1");
        const auto pts = sweep_points(spec);
        for (std::size_t i = 0; i < pts.size(); ++i)
            (void)config_for(spec, pts[i], 0, i);
    }

    // ---- CSV -------------------------------------------------------------

    inline constexpr const char *kResultHeader =
        "protocol,num_users,frame_slots,target_load,seed,point,replication,measured_frames,throughput,avg_network_aoi,normalized_aoi,"
        "realized_load,ps_estimate,analytic_ps,analytic_aoi";

    inline std::string to_csv_row(const ResultRecord &r)
    {
        std::ostringstream os;
        os << to_string(r.protocol) << ',' << r.num_users << ',' << r.frame_slots << ',' << format_number(r.target_load) << ',' << r.seed << ','
           << r.point << ',' << r.replication << ',' << r.measured_frames << ',' << format_number(r.throughput) << ','
           << format_number(r.avg_network_aoi) << ',' << format_number(r.normalized_aoi) << ',' << format_number(r.realized_load) << ','
           << format_number(r.ps_estimate) << ',' << (r.analytic_ps ? format_number(*r.analytic_ps) : "") << ','
           << (r.analytic_aoi ? format_number(*r.analytic_aoi) : "");
        return os.str();
    }

    struct PointSummary
    {
        SweepPoint point;
        Protocol protocol = Protocol::Irsa;
        std::uint32_t replications = 0;
        double throughput_mean = 0.0, throughput_sd = 0.0;
        double aoi_mean = 0.0, aoi_sd = 0.0;
        double normalized_mean = 0.0, normalized_sd = 0.0;
    };

    namespace detail
    {
        inline std::pair<double, double> mean_sd(const std::vector<double> &v)
        {
            double mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v)
                ss += (x - mean) * (x - mean);
            const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
            return {mean, sd};
        }
    }

    /// Mean and sample standard deviation per sweep point.
    inline std::vector<PointSummary> summarize(const std::vector<ResultRecord> &records)
    {
        std::map<std::size_t, std::vector<const ResultRecord *>> by_point;
        for (const auto &r : records)
            by_point[r.point].push_back(&r);
        std::vector<PointSummary> out;
        for (const auto &[idx, rs] : by_point)
        {
            PointSummary s;
            s.point = {rs.front()->num_users, rs.front()->frame_slots, rs.front()->target_load};
            s.protocol = rs.front()->protocol;
            s.replications = static_cast<std::uint32_t>(rs.size());
            std::vector<double> th, aoi, norm;
            for (const auto *r : rs)
            {
                th.push_back(r->throughput);
                aoi.push_back(r->avg_network_aoi);
                norm.push_back(r->normalized_aoi);
            }
            std::tie(s.throughput_mean, s.throughput_sd) = detail::mean_sd(th);
            std::tie(s.aoi_mean, s.aoi_sd) = detail::mean_sd(aoi);
            std::tie(s.normalized_mean, s.normalized_sd) = detail::mean_sd(norm);
            out.push_back(s);
        }
        return out;
    }

    inline void write_summary_csv(std::ostream &os, const std::vector<PointSummary> &summary)
    {
        os << "protocol,num_users,frame_slots,target_load,replications,throughput_mean,throughput_sd,avg_network_aoi_mean,avg_network_aoi_sd,"
              "normalized_aoi_mean,normalized_aoi_sd\n";
        for (const auto &s : summary)
        {
            os << to_string(s.protocol) << ',' << s.point.num_users << ',' << s.point.frame_slots << ',' << format_number(s.point.target_load) << ','
               << s.replications << ',' << format_number(s.throughput_mean) << ',' << format_number(s.throughput_sd) << ','
               << format_number(s.aoi_mean) << ',' << format_number(s.aoi_sd) << ',' << format_number(s.normalized_mean) << ','
               << format_number(s.normalized_sd) << '\n';
        }
    }

    inline std::filesystem::path companion_path(const std::filesystem::path &out, std::string_view tag)
    {
        auto p = out;
        const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
        p.replace_extension();
        p += std::string(".") + std::string(tag) + ext;
        return p;
    }

    // ---- experiment ---------------------------------------------------------

    inline ResultRecord run_point(const ExperimentSpec &spec, const SweepPoint &pt, std::size_t point_index, std::uint32_t replication)
    {
        const SimConfig cfg = config_for(spec, pt, replication, point_index);
        const auto t0 = std::chrono::steady_clock::now();
        const RunMetrics m = run_protocol(cfg);
        ResultRecord r;
        r.protocol = cfg.protocol;
        r.num_users = cfg.num_users;
        r.frame_slots = cfg.frame_slots;
        r.target_load = cfg.target_load;
        r.seed = cfg.seed;
        r.point = point_index;
        r.replication = replication;
        r.measured_frames = m.measured_frames;
        r.throughput = m.throughput;
        r.avg_network_aoi = m.avg_network_aoi;
        r.normalized_aoi = m.normalized_aoi;
        r.realized_load = m.realized_load;
        r.ps_estimate = m.per_frame_success_prob;
        if (spec.analytic || cfg.protocol == Protocol::AtIrsa)
        {
            switch (cfg.protocol)
            {
            case Protocol::AtIrsa: {
                // One estimate per sweep point, shared by its replications.
                const auto est = estimate_ps(cfg.frame_slots, cfg.distribution, cfg.target_load, spec.ps_trials,
                                             derive_seed(spec.base.seed, {point_index, 0xffffffffULL}), {LoadModel::Fixed, 1});
                r.analytic_ps = est.success_prob;
                if (est.success_prob > 0.0)
                    r.analytic_aoi = at_irsa_aoi_approx({double(cfg.frame_slots), double(cfg.num_users), cfg.target_load, est.success_prob});
                break;
            }
            case Protocol::Irsa:
                if (m.throughput > 0.0)
                    r.analytic_aoi = irsa_aoi(cfg.frame_slots, cfg.num_users, m.throughput);
                break;
            case Protocol::SlottedAloha:
                r.analytic_aoi = sa_aoi(cfg.num_users, sa_throughput(cfg.num_users));
                break;
            }
        }
        r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }

    /// Runs every (sweep point, replication) task on a worker pool. Records
    /// reach `sink` in (point, replication) order regardless of completion
    /// order.
    inline std::vector<ResultRecord> run_experiment(const ExperimentSpec &spec, const std::function<void(const ResultRecord &)> &sink = {})
    {
        validate_experiment(spec);
        const auto pts = sweep_points(spec);
        const std::size_t tasks = pts.size() * spec.replications;
        std::vector<std::optional<ResultRecord>> results(tasks);
        std::mutex mu;
        std::size_t next_task = 0;
        std::size_t next_emit = 0;
        std::exception_ptr error;

        auto worker = [&] {
            for (;;)
            {
                std::size_t t;
                {
                    std::lock_guard lock(mu);
                    if (next_task >= tasks || error)
                        return;
                    t = next_task++;
                }
                try
                {
                    ResultRecord r = run_point(spec, pts[t / spec.replications], t / spec.replications,
                                               static_cast<std::uint32_t>(t % spec.replications));
                    std::lock_guard lock(mu);
                    results[t] = std::move(r);
                    while (next_emit < tasks && results[next_emit])
                    {
                        if (sink)
                            sink(*results[next_emit]);
                        ++next_emit;
                    }
                }
                catch (...)
                {
                    std::lock_guard lock(mu);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        };

        unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
        if (threads <= 1)
        {
            worker();
        }
        else
        {
            std::vector<std::jthread> pool;
            for (unsigned i = 0; i < threads; ++i)
                pool.emplace_back(worker);
        }
        if (error)
            std::rethrow_exception(error);

        std::vector<ResultRecord> out;
        out.reserve(tasks);
        for (auto &r : results)
            out.push_back(std::move(*r));
        return out;
    }

    /// Runs the experiment and writes the results CSV incrementally, plus the
    /// `.summary` and `.timing` companions next to it.
    inline std::vector<ResultRecord> run_experiment_to_files(const ExperimentSpec &spec)
    {
        if (spec.output_path.empty())
            throw std::invalid_argument("experiment: output_path is required");
        std::ofstream out(spec.output_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + spec.output_path.string());
        out << kResultHeader << '\n';
        auto records = run_experiment(spec, [&](const ResultRecord &r) {
            out << to_csv_row(r) << '\n';
            out.flush();
        });
        if (!out)
            throw std::runtime_error("write failed: " + spec.output_path.string());

        std::ofstream summary(companion_path(spec.output_path, "summary"), std::ios::binary);
        write_summary_csv(summary, summarize(records));
        std::ofstream timing(companion_path(spec.output_path, "timing"), std::ios::binary);
        timing << "point,replication,wall_time_seconds\n";
        for (const auto &r : records)
            timing << r.point << ',' << r.replication << ',' << format_number(r.wall_time_seconds) << '\n';
        if (!summary || !timing)
            throw std::runtime_error("cannot write companion files for " + spec.output_path.string());
        return records;
    }

    // ---- comparison table ------------------------------------------------

    inline constexpr double kTableSlottedAloha = std::numbers::e;
    inline constexpr double kTableThresholdAloha = 1.4169;
    inline constexpr double kTableStationaryThinning = std::numbers::e / 2.0;
    inline constexpr double kTableMiniSlottedThreshold = 0.9641;
    inline constexpr double kTableAtIrsaReference = 0.6849;

    struct Table1Row
    {
        double slotted_aloha = kTableSlottedAloha;
        double threshold_aloha = kTableThresholdAloha;
        double stationary_thinning = kTableStationaryThinning;
        double mini_slotted_threshold = kTableMiniSlottedThreshold;
        double at_irsa_reference = kTableAtIrsaReference;
        double at_irsa = 0.0;
        double deviation_percent = 0.0;
    };

    inline Table1Row table1_row(double at_irsa_normalized)
    {
        Table1Row row;
        row.at_irsa = at_irsa_normalized;
        row.deviation_percent = 100.0 * (at_irsa_normalized - kTableAtIrsaReference) / kTableAtIrsaReference;
        return row;
    }

    /// Normalized asymptotic AoI (Delta / U) of the benchmark schemes next to
    /// the locally computed AT-IRSA value.
    inline std::string report_table1(double at_irsa_normalized)
    {
        const Table1Row row = table1_row(at_irsa_normalized);
        char line[256];
        std::string out = "scheme     | Delta/U\n"
                          "-----------+---------\n";
        auto add = [&](const char *name, double v) {
            std::snprintf(line, sizeof line, "%-10s | %.4f\n", name, v);
            out += line;
        };
        add("SA", row.slotted_aloha);
        add("TA", row.threshold_aloha);
        add("SAT", row.stationary_thinning);
        add("MiSTA", row.mini_slotted_threshold);
        add("AT-IRSA*", row.at_irsa_reference);
        std::snprintf(line, sizeof line, "%-10s | %.4f (%+.1f%% vs %.4f)\n", "AT-IRSA", row.at_irsa, row.deviation_percent, row.at_irsa_reference);
        out += line;
        out += "* reference value, U=45000, m=800, Lambda(x)=x^3\n";
        return out;
    }

    // ---- figure data ---------------------------------------------------------

    enum class Figure
    {
        ThroughputVsLoad,
        AoiVsUsers,
        AnalyticVsSim,
    };

    inline Figure parse_figure(std::string_view s)
    {
        if (s == "throughput_vs_load")
            return Figure::ThroughputVsLoad;
        if (s == "aoi_vs_users")
            return Figure::AoiVsUsers;
        if (s == "analytic_vs_sim")
            return Figure::AnalyticVsSim;
        throw std::invalid_argument("unknown figure '" + std::string(s) + "' (throughput_vs_load, aoi_vs_users, analytic_vs_sim)");
    }

    struct FigureOptions
    {
        DegreeDistribution distribution = DegreeDistribution::regular(3);
        std::vector<std::uint32_t> num_users{4000};
        std::vector<std::uint32_t> frame_slots{100};
        /// Target load per entry of frame_slots (throughput_vs_load: the load grid).
        std::vector<double> loads{0.66};
        std::uint64_t frames = 10000;
        std::uint32_t replications = 1;
        std::uint64_t ps_trials = 10000;
        std::uint64_t seed = 1;
        unsigned threads = 0;
    };

    namespace detail
    {
        inline std::vector<ResultRecord> run_series(const FigureOptions &o, Protocol protocol, std::vector<std::uint32_t> users,
                                                    std::vector<std::uint32_t> slots, std::vector<double> loads, std::uint64_t seed,
                                                    std::uint64_t frames, bool analytic)
        {
            ExperimentSpec spec;
            spec.base.protocol = protocol;
            spec.base.distribution = o.distribution;
            spec.base.seed = seed;
            spec.base.num_users = users.front();
            spec.base.frame_slots = slots.front();
            spec.base.target_load = loads.front();
            spec.sweep_num_users = std::move(users);
            spec.sweep_frame_slots = std::move(slots);
            spec.sweep_target_load = std::move(loads);
            spec.measured_frames = frames;
            spec.replications = o.replications;
            spec.analytic = analytic;
            spec.ps_trials = o.ps_trials;
            spec.threads = o.threads;
            return run_experiment(spec);
        }
    }

    /// CSV data behind the throughput curve, the AoI-vs-population plot and the
    /// analytic-vs-simulation comparison.
    inline std::string emit_fig_data(Figure figure, const FigureOptions &o)
    {
        if (o.num_users.empty() || o.frame_slots.empty() || o.loads.empty())
            throw std::invalid_argument("figdata: users, frame slots and loads must be non-empty");
        std::ostringstream os;
        switch (figure)
        {
        case Figure::ThroughputVsLoad: {
            os << "load,irsa_throughput,irsa_throughput_sd,irsa_realized_load,sa_throughput\n";
            const auto recs = detail::run_series(o, Protocol::Irsa, {o.num_users.front()}, {o.frame_slots.front()}, o.loads, o.seed, o.frames, false);
            for (const auto &s : summarize(recs))
            {
                double realized = 0.0;
                for (const auto &r : recs)
                    if (r.target_load == s.point.target_load)
                        realized += r.realized_load / s.replications;
                const double g = s.point.target_load;
                os << format_number(g) << ',' << format_number(s.throughput_mean) << ',' << format_number(s.throughput_sd) << ','
                   << format_number(realized) << ',' << format_number(g * std::exp(-g)) << '\n';
            }
            break;
        }
        case Figure::AoiVsUsers: {
            if (o.loads.size() != o.frame_slots.size())
                throw std::invalid_argument("figdata: one load per frame size is required");
            os << "protocol,num_users,frame_slots,target_load,normalized_aoi_mean,normalized_aoi_sd\n";
            std::uint64_t series = 0;
            auto emit = [&](const std::vector<ResultRecord> &recs) {
                for (const auto &s : summarize(recs))
                    os << to_string(s.protocol) << ',' << s.point.num_users << ',' << s.point.frame_slots << ','
                       << format_number(s.point.target_load) << ',' << format_number(s.normalized_mean) << ',' << format_number(s.normalized_sd)
                       << '\n';
            };
            for (auto u : o.num_users)
            {
                // Slotted ALOHA: ~200 round-robin cycles worth of slots.
                emit(detail::run_series(o, Protocol::SlottedAloha, {u}, {1}, {1.0}, derive_seed(o.seed, {series++}), 200ULL * u, false));
            }
            for (std::size_t i = 0; i < o.frame_slots.size(); ++i)
            {
                for (auto p : {Protocol::Irsa, Protocol::AtIrsa})
                    emit(detail::run_series(o, p, o.num_users, {o.frame_slots[i]}, {o.loads[i]}, derive_seed(o.seed, {series++}), o.frames, false));
            }
            break;
        }
        case Figure::AnalyticVsSim: {
            if (o.loads.size() != o.frame_slots.size())
                throw std::invalid_argument("figdata: one load per frame size is required");
            os << "num_users,frame_slots,target_load,ps_estimate,analytic_aoi,sim_aoi_mean,sim_aoi_sd,analytic_normalized,sim_normalized,relative_error\n";
            for (std::size_t i = 0; i < o.frame_slots.size(); ++i)
            {
                const auto recs = detail::run_series(o, Protocol::AtIrsa, o.num_users, {o.frame_slots[i]}, {o.loads[i]}, derive_seed(o.seed, {i}),
                                                     o.frames, true);
                for (const auto &s : summarize(recs))
                {
                    const ResultRecord *first = nullptr;
                    for (const auto &r : recs)
                        if (r.num_users == s.point.num_users)
                        {
                            first = &r;
                            break;
                        }
                    const double ps = first->analytic_ps.value_or(0.0);
                    const double an = first->analytic_aoi.value_or(kDivergentAoi);
                    os << s.point.num_users << ',' << s.point.frame_slots << ',' << format_number(s.point.target_load) << ',' << format_number(ps)
                       << ',' << format_number(an) << ',' << format_number(s.aoi_mean) << ',' << format_number(s.aoi_sd) << ','
                       << format_number(an / s.point.num_users) << ',' << format_number(s.normalized_mean) << ','
                       << format_number((an - s.aoi_mean) / s.aoi_mean) << '\n';
                }
            }
            break;
        }
        }
        return os.str();
    }
}
