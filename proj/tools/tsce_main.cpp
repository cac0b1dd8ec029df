// Command-line front end: data generation, simulation, discovery,
// explanation, tree operations and verbalization.

#include "tsce/coinrunner.hpp"
#include "tsce/context.hpp"
#include "tsce/data.hpp"
#include "tsce/discovery.hpp"
#include "tsce/engine.hpp"
#include "tsce/error.hpp"
#include "tsce/treeops.hpp"
#include "tsce/verbalize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace tsce;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

bool is_csv(const std::string& path) { return fs::path(path).extension() == ".csv"; }

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void warn_exclusivity(const ContextSet& contexts, const std::vector<Row>& rows) {
    ExclusivityReport report = contexts.check(rows);
    if (report.unmatched > 0) {
        std::cerr << "warning: " << report.unmatched << " of " << report.rows << " rows match no context\n";
    }
    if (report.overlapping > 0) {
        std::cerr << "warning: " << report.overlapping << " of " << report.rows
                  << " rows match several contexts; the first listed wins\n";
    }
}

std::string contexts_path(const std::string& given) {
    if (!given.empty()) return given;
    if (const char* env = std::getenv("TSCE_CONTEXTS")) return env;
    throw Error(ErrorCode::invalid_argument, "--contexts is required (or set TSCE_CONTEXTS)");
}

TimedVar parse_target(const std::string& text) {
    auto at = text.find('@');
    if (at == std::string::npos || at == 0) {
        throw Error(ErrorCode::invalid_argument, "target must look like <var>@<t>, got '" + text + "'");
    }
    try {
        std::size_t used = 0;
        int t = std::stoi(text.substr(at + 1), &used);
        if (used != text.size() - at - 1) throw std::invalid_argument("trailing");
        return {text.substr(0, at), t};
    } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_argument, "bad time in target '" + text + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal structural causal explanations"};
    app.require_subcommand(1);

    // gen-hans
    HansGeneratorConfig hans;
    std::string hans_out;
    auto* gen = app.add_subcommand("gen-hans", "Generate the synthetic Age/Nutrition/Health/Mobility panel");
    gen->add_option("--n", hans.individuals, "Individuals")->capture_default_str();
    gen->add_option("--t", hans.steps, "Time steps")->capture_default_str();
    gen->add_option("--seed", hans.seed, "RNG seed")->capture_default_str();
    gen->add_option("--noise", hans.noise_scale, "Noise scale relative to the mean")->capture_default_str();
    gen->add_option("--out", hans_out, "Output CSV")->required();

    // simulate
    std::string agent = "killer", sim_out;
    std::size_t rollouts = 500;
    double epsilon = 0.02;
    std::uint64_t sim_seed = 0;
    GameConfig game;
    bool render = false;
    auto* sim = app.add_subcommand("simulate", "Record CoinRunner rollouts as JSONL");
    sim->add_option("--agent", agent, "killer | coincollector | optimal | random")->capture_default_str();
    sim->add_option("--rollouts", rollouts, "Number of rollouts")->capture_default_str();
    sim->add_option("--epsilon", epsilon, "Probability of a random action per step")->capture_default_str();
    sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim->add_option("--width", game.width, "Grid width")->capture_default_str();
    sim->add_option("--height", game.height, "Grid height")->capture_default_str();
    sim->add_option("--out", sim_out, "Output JSONL")->required();
    sim->add_flag("--render", render, "Print every frame as ASCII to stdout");

    // discover
    std::string method = "granger", disc_contexts, disc_in, disc_out, lambdas, lambda_rule = "min";
    DiscoveryConfig disc;
    auto* dis = app.add_subcommand("discover", "Learn lag-1 graphs per context and average them");
    dis->add_option("--method", method, "granger | lasso")->capture_default_str();
    dis->add_option("--contexts", disc_contexts, "Context JSON (graphs optional)");
    dis->add_option("--in", disc_in, "Rollout JSONL or panel CSV")->required();
    dis->add_option("--out", disc_out, "Output directory")->required();
    dis->add_option("--margin", disc.margin, "Margin frames around context runs")->capture_default_str();
    dis->add_option("--noise", disc.noise_sigma, "Std. dev. of noise added to binary columns")->capture_default_str();
    dis->add_option("--alpha", disc.alpha_level, "Granger significance level")->capture_default_str();
    dis->add_option("--min-samples", disc.min_samples, "Minimum frames per segment")->capture_default_str();
    dis->add_option("--prune", disc.prune, "Drop averaged weights below this magnitude")->capture_default_str();
    dis->add_option("--folds", disc.folds, "Lasso cross-validation folds")->capture_default_str();
    dis->add_option("--lambdas", lambdas, "Comma-separated lasso grid (default: automatic)");
    dis->add_option("--lambda-rule", lambda_rule, "Lasso penalty choice: min (lowest CV error) | 1se")
        ->capture_default_str();
    dis->add_option("--seed", disc.seed, "Noise seed")->capture_default_str();

    // explain
    std::string ex_data, ex_contexts, question, mode = "retro", select = "all", ex_out;
    int depth = 2;
    bool sign_only = false;
    auto* exp = app.add_subcommand("explain", "Build an explanation tree for a why-question");
    exp->add_option("--data", ex_data, "Panel CSV or rollout JSONL")->required();
    exp->add_option("--contexts", ex_contexts, "Context JSON with graphs (default: $TSCE_CONTEXTS)");
    exp->add_option("--question", question,
                    "'<var> <|> <mean|p<k>> @ t=<int> ind=<int>' or '<var> @ t=<int> rollout=<id>'")
        ->required();
    exp->add_option("--mode", mode, "retro | antic")->capture_default_str();
    exp->add_option("--depth", depth, "Maximum depth K")->capture_default_str();
    exp->add_option("--select", select, "all | topn:<n> | theta:<x> | theta:<x>|topn:<n>")->capture_default_str();
    exp->add_flag("--sign-only", sign_only, "Sign-only indicators (anticipation at runtime)");
    exp->add_option("--out", ex_out, "Output tree JSON (default stdout)");

    // treeop
    std::string op_in, op_out, vars, target;
    int width = 0, gap = 1;
    bool rewrite = false;
    auto* top = app.add_subcommand("treeop", "Transform an explanation tree (or mask a graph)");
    top->require_subcommand(1);
    auto* op_mask = top->add_subcommand("mask", "Remove intermediate variables, bridging weights");
    op_mask->add_option("--vars", vars, "Comma-separated variables")->required();
    auto* op_path = top->add_subcommand("path", "Keep the path to one node plus side branches");
    op_path->add_option("--target", target, "<var>@<t>")->required();
    op_path->add_option("--width", width, "Side-branch depth")->capture_default_str();
    auto* op_lno = top->add_subcommand("leave-n-out", "Merge sequences across short interruptions");
    op_lno->add_option("--gap", gap, "Maximum interruption length")->capture_default_str();
    op_lno->add_flag("--rewrite", rewrite, "Overwrite interrupters' child indicators");
    for (CLI::App* sub : {op_mask, op_path, op_lno}) {
        sub->add_option("--in", op_in, "Input tree JSON (graph JSON for mask)")->required();
        sub->add_option("--out", op_out, "Output JSON (default stdout)");
    }

    // verbalize
    std::string vb_in, lexicon_path;
    bool coefficients = false;
    auto* vb = app.add_subcommand("verbalize", "Render a tree as sentences");
    vb->add_option("--in", vb_in, "Tree JSON")->required();
    vb->add_option("--lexicon", lexicon_path, "Lexicon file");
    vb->add_flag("--coefficients", coefficients, "Append edge weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: INVALID_ARGUMENT: " << e.what() << "\n";
        return exit_code(ErrorCode::invalid_argument);
    }

    try {
        if (*gen) {
            write_text_file(hans_out, panel_to_csv(generate_hans(hans)));
        } else if (*sim) {
            AgentKind kind = agent_kind_from_string(agent);
            if (render) {
                std::vector<Rollout> out;
                for (std::size_t i = 0; i < rollouts; ++i) {
                    Rollout seeded = simulate(kind, i + 1, sim_seed, epsilon, game).back();
                    std::cout << "rollout " << i << "\n";
                    out.push_back(run_agent(kind, seeded.seed, epsilon, game, i,
                                            [](const GameState& s) { std::cout << render_ascii(s); }));
                }
                write_text_file(sim_out, rollouts_to_jsonl(out));
            } else {
                write_text_file(sim_out, rollouts_to_jsonl(simulate(kind, rollouts, sim_seed, epsilon, game)));
            }
        } else if (*dis) {
            disc.method = discovery_method_from_string(method);
            disc.lambda_rule = lambda_rule_from_string(lambda_rule);
            if (!lambdas.empty()) {
                std::vector<double> grid;
                for (const std::string& s : split_list(lambdas)) {
                    try {
                        grid.push_back(std::stod(s));
                    } catch (const std::exception&) {
                        throw Error(ErrorCode::invalid_argument, "bad lambda '" + s + "'");
                    }
                }
                disc.lambdas = grid;
            }
            ContextSet contexts = context_set_from_json(read_text_file(contexts_path(disc_contexts)), false);
            DiscoveryResult result;
            if (is_csv(disc_in)) {
                result = discover(panel_from_csv(read_text_file(disc_in)), contexts, disc);
            } else {
                result = discover(rollouts_from_jsonl(read_text_file(disc_in)), contexts, disc);
            }
            std::error_code ec;
            fs::create_directories(disc_out, ec);
            if (ec) throw Error(ErrorCode::io_error, "cannot create '" + disc_out + "': " + ec.message());
            nlohmann::ordered_json report;
            report["version"] = 1;
            report["contexts"] = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < result.contexts.size(); ++c) {
                const Context& ctx = result.contexts.contexts()[c];
                write_text_file((fs::path(disc_out) / (ctx.name + ".json")).string(), graph_to_json(ctx.graph));
                report["contexts"].push_back(nlohmann::ordered_json::parse(result.reports[c].report_json));
                for (const std::string& w : result.reports[c].warnings) {
                    std::cerr << "warning: " << ctx.name << ": " << w << "\n";
                }
            }
            write_text_file((fs::path(disc_out) / "contexts.json").string(), context_set_to_json(result.contexts));
            write_text_file((fs::path(disc_out) / "report.json").string(), report.dump(1) + "\n");
        } else if (*exp) {
            ContextSet contexts = context_set_from_json(read_text_file(contexts_path(ex_contexts)));
            WhyQuestion q = WhyQuestion::parse(question);
            ExplainOptions options;
            options.mode = explain_mode_from_string(mode);
            options.selection = SelectionConfig::parse(select, depth);
            options.sign_only = sign_only;
            ExplanationTree tree;
            if (is_csv(ex_data)) {
                if (q.behaviour()) {
                    throw Error(ErrorCode::invalid_question, "panel data needs '<var> <|> <stat> @ t=<int> ind=<int>'");
                }
                PanelDataset data = panel_from_csv(read_text_file(ex_data));
                StatisticTable phi(data, *q.statistic);
                PanelTrajectory traj(data, q.unit, &phi);
                std::vector<Row> rows;
                for (int t = 0; t < traj.horizon(); ++t) rows.push_back(traj.row(t));
                warn_exclusivity(contexts, rows);
                tree = explain(validate_question(q, traj, contexts), contexts, traj, options);
            } else {
                if (!q.behaviour()) {
                    throw Error(ErrorCode::invalid_question, "rollouts need '<var> @ t=<int> rollout=<id>'");
                }
                std::vector<Rollout> all = rollouts_from_jsonl(read_text_file(ex_data));
                const Rollout* chosen = nullptr;
                for (const Rollout& r : all) {
                    if (r.id == q.unit) chosen = &r;
                }
                if (!chosen) throw Error(ErrorCode::invalid_question, "no rollout with id " + std::to_string(q.unit));
                RolloutTrajectory traj(*chosen);
                std::vector<Row> rows;
                for (int t = 0; t < traj.horizon(); ++t) rows.push_back(traj.row(t));
                warn_exclusivity(contexts, rows);
                tree = explain(validate_question(q, traj, contexts), contexts, traj, options);
            }
            emit(ex_out, tree_to_json(tree));
        } else if (*top) {
            std::string text = read_text_file(op_in);
            if (*op_mask) {
                std::set<std::string> masked;
                for (const std::string& v : split_list(vars)) masked.insert(v);
                if (text.find("\"nodes\"") == std::string::npos) {
                    emit(op_out, graph_to_json(mask_graph(graph_from_json(text), masked)));
                } else {
                    emit(op_out, tree_to_json(mask_tree(tree_from_json(text), masked)));
                }
            } else if (*op_path) {
                emit(op_out, tree_to_json(path_channel(tree_from_json(text), parse_target(target), width)));
            } else {
                emit(op_out, tree_to_json(leave_n_out(tree_from_json(text), gap, rewrite)));
            }
        } else if (*vb) {
            Lexicon lex = lexicon_path.empty() ? Lexicon{} : Lexicon::parse(read_text_file(lexicon_path));
            VerbalizeOptions options;
            options.coefficients = coefficients;
            std::cout << verbalize(tree_from_json(read_text_file(vb_in)), lex, options);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << error_name(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: INTERNAL: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
