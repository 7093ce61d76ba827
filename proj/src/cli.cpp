#include "otlab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "otlab/certify.hpp"
#include "otlab/ctransform.hpp"
#include "otlab/dual.hpp"
#include "otlab/envelope.hpp"
#include "otlab/fixtures.hpp"
#include "otlab/io.hpp"
#include "otlab/oracle.hpp"
#include "otlab/primal.hpp"

namespace otlab {

namespace {

struct Budgets {
  std::uint64_t oracle = kDefaultOracleBudget;
  std::uint64_t enumeration = kDefaultEnumerationBudget;
};

/// OT_LAB_BUDGET replaces both the oracle tree budget and the cyclic
/// enumeration budget.
Budgets budgets_from_env() {
  Budgets b;
  if (const char* raw = std::getenv("OT_LAB_BUDGET"); raw && *raw) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (*end != '\0' || v == 0) {
      throw Error(ErrorCode::InvalidArgument, "OT_LAB_BUDGET must be a positive integer");
    }
    b.oracle = v;
    b.enumeration = v;
  }
  return b;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "empty list '" + text + "'");
  return parts;
}

template <Scalar T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  for (const auto& part : split_list(text)) out.push_back(scalar_from_json<T>(json(part)));
  return out;
}

/// Loads the instance and hands a validated copy, in the requested mode,
/// to `body`.
template <typename Body>
int with_instance(const std::string& path, bool force_float, Body&& body) {
  AnyInstance any = read_instance_file(path);
  if (force_float) {
    if (auto* exact = std::get_if<Instance<Rational>>(&any)) any = to_float(*exact);
  }
  return std::visit(
      [&](auto& inst) { return body(validate_instance(std::move(inst))); }, any);
}

void print(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite Kantorovich duality lab: exact transport, dual potentials, certificates"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");

  std::string instance_path;
  bool force_float = false;
  bool with_dual = false;

  auto* solve = app.add_subcommand("solve", "Solve the transport problem exactly");
  solve->add_flag("--dual", with_dual, "Also emit optimal potentials of the transform form");
  solve->add_flag("--float", force_float, "Use float arithmetic");
  solve->add_option("instance", instance_path, "Instance JSON")->required();

  std::size_t k_max = 4;
  auto* certify_cmd = app.add_subcommand("certify", "Solve, then certify the optimal pair");
  certify_cmd->add_flag("--float", force_float, "Use float arithmetic");
  certify_cmd->add_option("--k-max", k_max, "Largest cycle length checked")
      ->check(CLI::Range(2, 16))
      ->capture_default_str();
  certify_cmd->add_option("instance", instance_path, "Instance JSON")->required();

  std::string phi_text;
  auto* transform = app.add_subcommand("transform", "c-transforms of a potential over X");
  transform->add_option("--phi", phi_text, "Comma-separated potential over X")->required();
  transform->add_flag("--float", force_float, "Use float arithmetic");
  transform->add_option("instance", instance_path, "Instance JSON")->required();

  std::string levels_text;
  auto* envelope = app.add_subcommand("envelope", "Lipschitz envelope schedule");
  envelope->add_option("--levels", levels_text, "Comma-separated increasing levels n")->required();
  envelope->add_flag("--float", force_float, "Use float arithmetic");
  envelope->add_option("instance", instance_path, "Instance JSON")->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force spanning-tree optimum (small instances)");
  oracle->add_flag("--dual", with_dual, "Also emit tree potentials");
  oracle->add_flag("--float", force_float, "Use float arithmetic");
  oracle->add_option("instance", instance_path, "Instance JSON")->required();

  FixtureRequest fixture;
  std::string output_path;
  auto* gen = app.add_subcommand("gen", "Generate a fixture instance");
  gen->add_option("fixture", fixture.name, "indicator | random-uniform | separable | discrete-metric-spike")
      ->required();
  gen->add_option("--size", fixture.size, "Points per side")->capture_default_str();
  gen->add_option("--seed", fixture.seed, "Generator seed")->capture_default_str();
  gen->add_flag("--float", force_float, "Write the instance in float mode");
  gen->add_option("-o,--output", output_path, "Output file (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    const Budgets budgets = budgets_from_env();

    if (*solve) {
      return with_instance(instance_path, force_float, [&](const auto& inst) {
        using T = std::decay_t<decltype(inst.get().mu.weights[0])>;
        json doc;
        if (with_dual) {
          auto both = solve_primal_dual(inst);
          doc = plan_result_to_json(both.primal);
          doc["dual"] = potentials_to_json(both.dual);
          doc["dual_value"] = scalar_to_json(T(dual_value(both.dual, inst->mu, inst->nu)));
        } else {
          doc = plan_result_to_json(solve_primal(inst));
        }
        print(out, doc);
        return kExitOk;
      });
    }

    if (*certify_cmd) {
      return with_instance(instance_path, force_float, [&](const auto& inst) {
        using T = std::decay_t<decltype(inst.get().mu.weights[0])>;
        auto both = solve_primal_dual(inst);
        CertifyOptions<T> options;
        options.k_max = k_max;
        options.budget = budgets.enumeration;
        const auto cert = certify(inst.get(), both.primal.plan, both.dual, options);
        print(out, certificate_to_json(cert));
        return cert.verdict ? kExitOk : kExitCertificateFailed;
      });
    }

    if (*transform) {
      return with_instance(instance_path, force_float, [&](const auto& inst) {
        using T = std::decay_t<decltype(inst.get().mu.weights[0])>;
        const auto phi = parse_list<T>(phi_text);
        const auto& cost = inst->cost;
        const auto phi_c = c_transform(phi, cost);
        json doc;
        doc["mode"] = std::string(mode_name(NumTraits<T>::mode));
        doc["phi"] = vector_to_json(phi);
        doc["phi_c"] = vector_to_json(phi_c);
        doc["phi_c_cbar"] = vector_to_json(cbar_transform(phi_c, cost));
        if (cost.all_finite()) {
          const auto normalized = normalize_pair(phi, cost);
          doc["normalized"] = potentials_to_json(normalized);
          doc["c_concave"] = is_c_concave(phi, cost);
          doc["pseudometric_x"] = matrix_to_json(induced_pseudometric(cost, Axis::OverX).entries);
          doc["pseudometric_y"] = matrix_to_json(induced_pseudometric(cost, Axis::OverY).entries);
        }
        print(out, doc);
        return kExitOk;
      });
    }

    if (*envelope) {
      return with_instance(instance_path, force_float, [&](const auto& inst) {
        using T = std::decay_t<decltype(inst.get().mu.weights[0])>;
        const auto schedule = envelope_schedule(inst, parse_list<T>(levels_text));
        json doc = schedule_to_json(schedule);
        if (inst->cost.all_finite()) {
          const auto n_star = saturation_index(inst.get());
          doc["saturation_index"] = n_star ? scalar_to_json(*n_star) : json(nullptr);
        }
        print(out, doc);
        return kExitOk;
      });
    }

    if (*oracle) {
      return with_instance(instance_path, force_float, [&](const auto& inst) {
        using T = std::decay_t<decltype(inst.get().mu.weights[0])>;
        OracleOptions<T> options;
        options.budget = budgets.oracle;
        json doc = plan_result_to_json(oracle_primal(inst, options));
        if (with_dual) {
          const auto pot = oracle_dual(inst, options);
          doc["dual"] = potentials_to_json(pot);
          doc["dual_value"] = scalar_to_json(T(dual_value(pot, inst->mu, inst->nu)));
        }
        print(out, doc);
        return kExitOk;
      });
    }

    if (*gen) {
      const json doc = fixture_to_json(fixture, force_float ? Mode::Float : Mode::Rational);
      if (output_path.empty()) {
        print(out, doc);
      } else {
        std::ofstream file(output_path);
        if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + output_path);
        print(file, doc);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  err << app.help();
  return kExitInputError;
}

}  // namespace otlab
