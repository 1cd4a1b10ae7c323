#include <boost/program_options.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rerl/generator.hpp"
#include "rerl/learner.hpp"
#include "rerl/regions.hpp"
#include "rerl/rera.hpp"
#include "rerl/teacher.hpp"

namespace po = boost::program_options;
using namespace rerl;

namespace {

std::int64_t target_max_constant(const Rera& a) {
    std::int64_t best = 0;
    for (const auto& t : a.transitions)
        best = std::max(best, t.guard.max_constant());
    return best;
}

TimedWord parse_word_or_die(const std::string& text, const Alphabet& sigma) {
    auto w = parse_timed_word(text, sigma);
    if (!w) {
        std::cerr << "error: cannot parse timed word: " << text << "\n";
        std::exit(1);
    }
    return *w;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(1);
    }
    out << text;
}

int cmd_learn(const std::vector<std::string>& args) {
    po::options_description desc("learn options");
    // clang-format off
    desc.add_options()
        ("target", po::value<std::string>()->required(), "target automaton file")
        ("K,K", po::value<std::int64_t>()->required(), "clock-constant bound")
        ("seed", po::value<std::uint64_t>()->default_value(0), "seed recorded in the report")
        ("max-queries", po::value<size_t>()->default_value(5000), "observation budget")
        ("max-iterations", po::value<size_t>()->default_value(200), "outer-loop budget")
        ("max-strategies", po::value<size_t>()->default_value(64), "candidates per round")
        ("output-dir", po::value<std::string>()->default_value("."), "output directory")
        ("emit-dot", po::bool_switch(), "write per-iteration graph snapshots");
    // clang-format on
    po::variables_map vm;
    po::store(po::command_line_parser(args).options(desc).run(), vm);
    po::notify(vm);

    Rera target = load_rera(vm["target"].as<std::string>());
    std::int64_t k = vm["K"].as<std::int64_t>();
    if (k < target_max_constant(target)) {
        std::cerr << "error: K=" << k << " is below the target's max constant "
                  << target_max_constant(target) << "\n";
        return 1;
    }

    LearnLimits limits;
    limits.max_queries = vm["max-queries"].as<size_t>();
    limits.max_iterations = vm["max-iterations"].as<size_t>();
    limits.max_strategies = vm["max-strategies"].as<size_t>();

    std::filesystem::path out_dir = vm["output-dir"].as<std::string>();
    std::filesystem::create_directories(out_dir);

    SimTeacher teacher(target);
    Learner learner(teacher, k, limits);
    if (vm["emit-dot"].as<bool>()) {
        learner.on_iteration = [&](size_t iter) {
            write_file(out_dir / ("iter-" + std::to_string(iter) + "-tdg.dot"),
                       learner.observations().tdg_dot());
            write_file(out_dir / ("iter-" + std::to_string(iter) + "-tog.dot"),
                       learner.observations().tog_dot());
        };
    }
    LearnResult result = learner.learn();

    write_file(out_dir / "hypothesis.rera", serialize_rera(result.hypothesis));
    std::ostringstream report;
    report << "status: " << (result.success ? "success" : "limit-exhausted")
           << "\n"
           << "seed: " << vm["seed"].as<std::uint64_t>() << "\n"
           << "K: " << k << "\n"
           << "iterations: " << result.stats.iterations << "\n"
           << "membership_queries: " << result.stats.membership_queries << "\n"
           << "equivalence_queries: " << result.stats.equivalence_queries
           << "\n"
           << "prunes: " << result.stats.prunes << "\n"
           << "rebuilds: " << result.stats.rebuilds << "\n"
           << "hypothesis_locations: " << result.hypothesis.num_locations()
           << "\n";
    write_file(out_dir / "report.txt", report.str());
    std::cout << report.str();
    return result.success ? 0 : 2;
}

int cmd_member(const std::vector<std::string>& args) {
    if (args.size() != 2) {
        std::cerr << "usage: rerl member <automaton> \"<delay:action ...>\"\n";
        return 1;
    }
    Rera a = load_rera(args[0]);
    TimedWord w = parse_word_or_die(args[1], a.alphabet);
    std::cout << (a.member(w) ? "accept" : "reject") << "\n";
    return 0;
}

int cmd_equiv(const std::vector<std::string>& args) {
    if (args.size() != 2) {
        std::cerr << "usage: rerl equiv <automaton> <automaton>\n";
        return 1;
    }
    Rera a = load_rera(args[0]);
    Rera b = load_rera(args[1]);
    auto diff = find_difference(a, b);
    if (!diff) {
        std::cout << "equivalent\n";
        return 0;
    }
    std::cout << "different: " << format_timed_word(diff->word, a.alphabet)
              << " accepted by "
              << (diff->accepted_by_first ? "first" : "second") << "\n";
    return 1;
}

int cmd_export_dot(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "usage: rerl export-dot <automaton>\n";
        return 1;
    }
    std::cout << load_rera(args[0]).to_dot();
    return 0;
}

int cmd_bench(const std::vector<std::string>& args) {
    po::options_description desc("bench options");
    // clang-format off
    desc.add_options()
        ("n", po::value<int>()->default_value(20), "number of random targets")
        ("locations", po::value<int>()->default_value(3), "locations per target")
        ("alphabet", po::value<int>()->default_value(2), "alphabet size")
        ("K,K", po::value<std::int64_t>()->default_value(3), "clock-constant bound")
        ("seed", po::value<std::uint64_t>()->default_value(0), "generator seed");
    // clang-format on
    po::variables_map vm;
    po::store(po::command_line_parser(args).options(desc).run(), vm);
    po::notify(vm);

    int n = vm["n"].as<int>();
    GenParams params;
    params.locations = vm["locations"].as<int>();
    params.alphabet_size = vm["alphabet"].as<int>();
    params.k = vm["K"].as<std::int64_t>();
    std::uint64_t seed = vm["seed"].as<std::uint64_t>();

    std::cout << "# bench n=" << n << " locations=" << params.locations
              << " alphabet=" << params.alphabet_size << " K=" << params.k
              << " seed=" << seed << "\n";
    std::cout << "idx\tsuccess\titerations\tmembership\tequivalence\t"
                 "target_transitions\thypothesis_locations\n";
    int failures = 0;
    for (int i = 0; i < n; ++i) {
        Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(i));
        Rera target = random_rera(params, rng);
        SimTeacher teacher(target);
        Learner learner(teacher, params.k);
        LearnResult result = learner.learn();
        if (!result.success) ++failures;
        std::cout << i << "\t" << (result.success ? 1 : 0) << "\t"
                  << result.stats.iterations << "\t"
                  << result.stats.membership_queries << "\t"
                  << result.stats.equivalence_queries << "\t"
                  << target.transitions.size() << "\t"
                  << result.hypothesis.num_locations() << "\n";
    }
    std::cout << "# failures=" << failures << "\n";
    return failures == 0 ? 0 : 2;
}

int cmd_serve(const std::vector<std::string>& args) {
    if (args.size() != 1) {
        std::cerr << "usage: rerl serve <automaton>\n";
        return 1;
    }
    Rera target = load_rera(args[0]);
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        char op = line[0];
        std::string rest = line.size() > 2 ? line.substr(2) : std::string();
        if (op == 'M') {
            TimedWord w = parse_word_or_die(rest, target.alphabet);
            std::cout << (target.member(w) ? "A" : "R") << "\n" << std::flush;
        } else if (op == 'E') {
            Rera hyp = load_rera(rest);
            auto diff = find_difference(target, hyp);
            if (!diff) {
                std::cout << "Y\n" << std::flush;
            } else {
                std::cout << "C " << format_timed_word(diff->word, target.alphabet)
                          << " " << (diff->accepted_by_first ? "A" : "R") << "\n"
                          << std::flush;
            }
        } else {
            std::cout << "?\n" << std::flush;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << "usage: rerl <learn|member|equiv|export-dot|bench|serve> "
                     "[options]\n";
        return 1;
    }
    std::string cmd = args.front();
    std::vector<std::string> rest(args.begin() + 1, args.end());
    try {
        if (cmd == "learn") return cmd_learn(rest);
        if (cmd == "member") return cmd_member(rest);
        if (cmd == "equiv") return cmd_equiv(rest);
        if (cmd == "export-dot") return cmd_export_dot(rest);
        if (cmd == "bench") return cmd_bench(rest);
        if (cmd == "serve") return cmd_serve(rest);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: unknown command " << cmd << "\n";
    return 1;
}
