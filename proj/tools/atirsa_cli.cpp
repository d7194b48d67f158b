// Command-line front end: simulation runs, sweeps, analytic models, peak
// search, figure data and the comparison table.

#include <atirsa/atirsa.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{
    using namespace atirsa;

    struct Common
    {
        std::string protocol = "at-irsa";
        std::uint32_t users = 4000;
        std::uint32_t frame_slots = 100;
        double load = 0.66;
        std::string lambda = "3:1.0";
        std::uint64_t frames = 200000;
        std::optional<std::uint64_t> warmup;
        std::uint64_t seed = 1;
        std::uint32_t replications = 1;
        std::string out;
        bool trace = false;
        unsigned threads = 0;
    };

    void write_or_print(const std::string &path, const std::string &text)
    {
        if (path.empty())
        {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f || !(f << text))
            throw std::runtime_error("cannot write " + path);
    }

    std::vector<double> parse_grid(const std::string &text)
    {
        double a = 0, b = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':')
            throw std::invalid_argument("grid must be start:stop:step, got '" + text + "'");
        return load_grid(a, b, step);
    }

    int cmd_simulate(const Common &o)
    {
        ExperimentSpec spec;
        spec.base.protocol = parse_protocol(o.protocol);
        spec.base.num_users = o.users;
        spec.base.frame_slots = o.frame_slots;
        spec.base.target_load = o.load;
        spec.base.distribution = parse_distribution(o.lambda);
        spec.base.seed = o.seed;
        spec.measured_frames = o.frames;
        spec.warmup = o.warmup;
        spec.replications = o.replications;
        spec.threads = o.threads;
        spec.analytic = true;

        if (o.trace)
        {
            // Per-frame trace of replication 0 on stderr.
            const SimConfig cfg = config_for(spec, sweep_points(spec).front(), 0, 0);
            std::cerr << "frame,transmitters,decoded,theta,p\n";
            run_protocol(cfg, [](const FrameReport &r) {
                std::cerr << r.frame << ',' << r.transmitters << ',' << r.decoded.size() << ',' << r.theta << ','
                          << format_number(r.access_probability) << '\n';
            });
        }

        std::ostringstream os;
        os << kResultHeader << '\n';
        for (const auto &r : run_experiment(spec))
            os << to_csv_row(r) << '\n';
        write_or_print(o.out, os.str());
        return 0;
    }

    int cmd_sweep(const std::string &config, const Common &o, const CLI::App &sub)
    {
        ExperimentSpec spec = load_experiment(config);
        auto given = [&](const char *name) { return sub.count(name) > 0; };
        if (given("--protocol"))
            spec.base.protocol = parse_protocol(o.protocol);
        if (given("--users"))
            spec.base.num_users = o.users, spec.sweep_num_users.clear();
        if (given("--frame-slots"))
            spec.base.frame_slots = o.frame_slots, spec.sweep_frame_slots.clear();
        if (given("--load"))
            spec.base.target_load = o.load, spec.sweep_target_load.clear();
        if (given("--lambda"))
            spec.base.distribution = parse_distribution(o.lambda);
        if (given("--frames"))
            spec.measured_frames = o.frames;
        if (given("--warmup"))
            spec.warmup = o.warmup;
        if (given("--seed"))
            spec.base.seed = o.seed;
        if (given("--replications"))
            spec.replications = o.replications;
        if (given("--threads"))
            spec.threads = o.threads;
        if (given("--out"))
            spec.output_path = o.out;
        if (spec.output_path.empty())
            throw std::invalid_argument("sweep: no output path (set output_path in the config or pass --out)");
        const auto records = run_experiment_to_files(spec);
        std::cerr << records.size() << " records written to " << spec.output_path.string() << '\n';
        return 0;
    }

    int cmd_analytic(const Common &o, std::optional<double> throughput, std::optional<double> ps, std::uint64_t trials)
    {
        const Protocol p = parse_protocol(o.protocol);
        double value = 0.0;
        switch (p)
        {
        case Protocol::SlottedAloha:
            value = sa_aoi(o.users, throughput.value_or(sa_throughput(o.users)));
            break;
        case Protocol::Irsa:
            if (!throughput)
                throw std::invalid_argument("analytic irsa: --throughput is required");
            value = irsa_aoi(o.frame_slots, o.users, *throughput);
            break;
        case Protocol::AtIrsa: {
            if (!ps)
            {
                const auto est = estimate_ps(o.frame_slots, parse_distribution(o.lambda), o.load, trials, o.seed, {LoadModel::Fixed, 0, o.threads});
                ps = est.success_prob;
                std::cerr << "p_s = " << format_number(est.success_prob) << " +/- " << format_number(est.std_error) << '\n';
            }
            value = at_irsa_aoi_approx({double(o.frame_slots), double(o.users), o.load, *ps});
            break;
        }
        }
        std::ostringstream os;
        os << "protocol,num_users,frame_slots,target_load,avg_network_aoi,normalized_aoi\n"
           << to_string(p) << ',' << o.users << ',' << o.frame_slots << ',' << format_number(o.load) << ',' << format_number(value) << ','
           << format_number(value / o.users) << '\n';
        write_or_print(o.out, os.str());
        return 0;
    }

    int cmd_peak(const Common &o, const std::string &grid, std::uint64_t trials, bool fixed_load)
    {
        EstimateOptions opts{fixed_load ? LoadModel::Fixed : LoadModel::Binomial, fixed_load ? 0u : o.users, o.threads};
        const auto pk = find_peak_load(o.frame_slots, parse_distribution(o.lambda), parse_grid(grid), trials, o.seed, opts);
        std::ostringstream os;
        os << "load,success_prob,throughput\n";
        for (const auto &pt : pk.curve)
            os << format_number(pt.load) << ',' << format_number(pt.success_prob) << ',' << format_number(pt.throughput) << '\n';
        write_or_print(o.out, os.str());
        std::cerr << "G* = " << format_number(pk.load) << ", S* = " << format_number(pk.throughput) << '\n';
        return 0;
    }

    int cmd_figdata(const Common &o, const std::string &figure, const std::vector<std::uint32_t> &users, const std::vector<std::uint32_t> &slots,
                    const std::vector<double> &loads, std::uint64_t trials)
    {
        FigureOptions f;
        f.distribution = parse_distribution(o.lambda);
        f.num_users = users.empty() ? std::vector<std::uint32_t>{o.users} : users;
        f.frame_slots = slots.empty() ? std::vector<std::uint32_t>{o.frame_slots} : slots;
        f.loads = loads.empty() ? std::vector<double>{o.load} : loads;
        f.frames = o.frames;
        f.replications = o.replications;
        f.ps_trials = trials;
        f.seed = o.seed;
        f.threads = o.threads;
        write_or_print(o.out, emit_fig_data(parse_figure(figure), f));
        return 0;
    }

    int cmd_table1(const Common &o, std::optional<double> value, std::uint64_t trials)
    {
        if (!value)
        {
            const auto dist = parse_distribution(o.lambda);
            const auto pk = find_peak_load(o.frame_slots, dist, load_grid(0.6, 0.9, 0.01), trials, o.seed, {LoadModel::Binomial, o.users, o.threads});
            const auto ps = estimate_ps(o.frame_slots, dist, pk.load, trials, derive_seed(o.seed, {1}), {LoadModel::Fixed, 0, o.threads});
            value = at_irsa_aoi_approx({double(o.frame_slots), double(o.users), pk.load, ps.success_prob}) / o.users;
            std::cerr << "G* = " << format_number(pk.load) << ", p_s = " << format_number(ps.success_prob) << '\n';
        }
        write_or_print(o.out, report_table1(*value));
        return 0;
    }

    // "1:1,4,5/2:1,2,5" -> users with 1-based slot lists.
    FrameOccupancy parse_frame(std::uint32_t m, const std::string &text)
    {
        FrameOccupancy f{m, {}};
        std::stringstream users(text);
        std::string item;
        while (std::getline(users, item, '/'))
        {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("frame entry must be user:slot,slot,...");
            Transmission t;
            t.user = static_cast<UserId>(std::stoul(item.substr(0, colon)));
            std::stringstream slots(item.substr(colon + 1));
            std::string s;
            while (std::getline(slots, s, ','))
            {
                const unsigned long v = std::stoul(s);
                if (v < 1)
                    throw std::invalid_argument("slots are 1-based");
                t.slots.push_back(static_cast<SlotIndex>(v - 1));
            }
            f.transmissions.push_back(std::move(t));
        }
        validate_frame(f);
        return f;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Age of Information simulator for slotted ALOHA, IRSA and age-threshold IRSA"};
    app.require_subcommand(1);

    Common o;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--protocol", o.protocol, "sa | irsa | at-irsa")->capture_default_str();
        sub->add_option("--users", o.users, "Number of terminals U")->capture_default_str();
        sub->add_option("--frame-slots", o.frame_slots, "Slots per frame m")->capture_default_str();
        sub->add_option("--load", o.load, "Target channel load G (G* for at-irsa)")->capture_default_str();
        sub->add_option("--lambda", o.lambda, "Degree distribution, e.g. 3:1.0 or 2:0.5,3:0.5")->capture_default_str();
        sub->add_option("--frames", o.frames, "Measured frames (slots for sa)")->capture_default_str();
        sub->add_option("--warmup", o.warmup, "Warm-up frames (default: ten round-robin cycles)");
        sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
        sub->add_option("--replications", o.replications, "Replications per point")->capture_default_str();
        sub->add_option("--out", o.out, "Output file (default: stdout)");
        sub->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    };

    auto *simulate = app.add_subcommand("simulate", "Run one protocol/configuration");
    add_common(simulate);
    simulate->add_flag("--trace", o.trace, "Per-frame trace (frame,transmitters,decoded,theta,p) on stderr");

    std::string config;
    auto *sweep = app.add_subcommand("sweep", "Run an experiment file");
    sweep->add_option("config", config, "Experiment file (key = value)")->required()->check(CLI::ExistingFile);
    add_common(sweep);

    std::optional<double> throughput, ps;
    std::uint64_t trials = 20000;
    auto *analytic = app.add_subcommand("analytic", "Evaluate the closed-form AoI models");
    add_common(analytic);
    analytic->add_option("--throughput", throughput, "Throughput S (irsa, sa)");
    analytic->add_option("--ps", ps, "Per-frame success probability p_s (at-irsa; estimated when omitted)");
    analytic->add_option("--trials", trials, "Monte Carlo frames for p_s")->capture_default_str();

    std::string grid = "0.5:0.9:0.02";
    bool fixed_load = false;
    auto *peak = app.add_subcommand("peak", "Locate the peak-throughput load");
    add_common(peak);
    peak->add_option("--grid", grid, "start:stop:step")->capture_default_str();
    peak->add_option("--trials", trials, "Monte Carlo frames per grid point")->capture_default_str();
    peak->add_flag("--fixed-load", fixed_load, "Exactly round(m G) transmitters per frame instead of i.i.d. activation of --users");

    std::string figure;
    std::vector<std::uint32_t> fig_users, fig_slots;
    std::vector<double> fig_loads;
    auto *figdata = app.add_subcommand("figdata", "Emit CSV data for a figure");
    add_common(figdata);
    figdata->add_option("--figure", figure, "throughput_vs_load | aoi_vs_users | analytic_vs_sim")->required();
    figdata->add_option("--users-list", fig_users, "Populations, comma separated")->delimiter(',');
    figdata->add_option("--frame-slots-list", fig_slots, "Frame sizes, comma separated")->delimiter(',');
    figdata->add_option("--loads", fig_loads, "Loads (one per frame size; the grid for throughput_vs_load)")->delimiter(',');
    figdata->add_option("--trials", trials, "Monte Carlo frames for p_s")->capture_default_str();

    std::optional<double> value;
    auto *table1 = app.add_subcommand("table1", "Print the normalized-AoI comparison table");
    add_common(table1);
    table1->add_option("--value", value, "AT-IRSA Delta/U to report (computed from the analytic model when omitted)");
    table1->add_option("--trials", trials, "Monte Carlo frames per estimate")->capture_default_str();

    std::string frame_text;
    auto *decode = app.add_subcommand("decode", "Peel one frame and print round,user,slot events (slots 1-based)");
    decode->add_option("--frame-slots", o.frame_slots, "Slots per frame m")->required();
    decode->add_option("--frame", frame_text, "user:slot,slot,.../user:... with 1-based slots")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*simulate)
            return cmd_simulate(o);
        if (*sweep)
            return cmd_sweep(config, o, *sweep);
        if (*analytic)
            return cmd_analytic(o, throughput, ps, trials);
        if (*peak)
        {
            if (!peak->count("--users"))
                o.users = 4000;
            return cmd_peak(o, grid, trials, fixed_load);
        }
        if (*figdata)
            return cmd_figdata(o, figure, fig_users, fig_slots, fig_loads, trials);
        if (*table1)
        {
            if (!table1->count("--users"))
                o.users = 45000;
            if (!table1->count("--frame-slots"))
                o.frame_slots = 800;
            return cmd_table1(o, value, trials);
        }
        if (*decode)
        {
            write_trace(std::cout, decode_frame(parse_frame(o.frame_slots, frame_text)));
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
