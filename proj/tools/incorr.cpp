#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "incorr/error.hpp"
#include "incorr/io.hpp"
#include "incorr/project.hpp"
#include "incorr/render.hpp"
#include "incorr/service.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUnknownId = 2;

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

int exit_code_for(incorr::ErrorCode code) {
  switch (code) {
    case incorr::ErrorCode::UnknownCorrelation:
    case incorr::ErrorCode::UnknownLog:
    case incorr::ErrorCode::NotAPermutation:
      return kExitUnknownId;
    default:
      return kExitIo;
  }
}

void print_findings(const std::vector<incorr::Finding>& findings) {
  for (const incorr::Finding& f : findings) std::cerr << incorr::to_string(f) << "\n";
}

int build_panel(const std::string& input, const std::string& output, const std::string& level,
                const std::string& order) {
  incorr::LoadedProject loaded = incorr::load_project(incorr::read_file(input));
  print_findings(loaded.warnings);
  incorr::Project project = std::move(loaded.project);
  if (!order.empty()) project = incorr::set_log_order(project, split_ids(order));
  if (!level.empty()) project = incorr::set_leveling(project, level);

  incorr::write_file_atomic(output, incorr::render_project(project));
  std::cout << project.logs.size() << " logs, " << project.dataset.contacts.size() << " contacts, " << project.panel.correlations.size()
            << " correlations\n";
  return 0;
}

int validate(const std::string& input) {
  std::vector<incorr::Finding> findings;
  const std::string bytes = incorr::read_file(input);
  try {
    incorr::load_dataset(bytes, findings);
  } catch (const incorr::ValidationFailure& e) {
    findings.insert(findings.begin(), e.findings().begin(), e.findings().end());
  }
  for (const incorr::Finding& f : findings) std::cout << incorr::to_string(f) << "\n";
  if (incorr::has_errors(findings)) return kExitIo;
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation panels from digital outcrop interpretations"};
  app.require_subcommand(1);

  std::string input, output, level, order;
  auto* build = app.add_subcommand("build-panel", "Render a project's correlation panel to SVG");
  build->add_option("project", input, "Project JSON")->required();
  build->add_option("-o,--output", output, "Output SVG")->required();
  build->add_option("--level", level, "Correlation id to level the panel on");
  build->add_option("--order", order, "Comma-separated log order");

  std::string dataset_path;
  auto* check = app.add_subcommand("validate", "Check a dataset and print findings");
  check->add_option("dataset", dataset_path, "Dataset JSON")->required();

  incorr::ServeOptions serve_options;
  std::string data_dir = ".", seed_dataset, ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the local HTTP API");
  serve->add_option("--host", serve_options.host, "Bind address");
  serve->add_option("--port", serve_options.port, "TCP port");
  serve->add_option("--data-dir", data_dir, "Directory holding project.json");
  serve->add_option("--dataset", seed_dataset, "Dataset to start from when no project exists");
  serve->add_option("--ui-dir", ui_dir, "Built UI assets to serve at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) return build_panel(input, output, level, order);
    if (*check) return validate(dataset_path);
    serve_options.data_dir = data_dir;
    if (!seed_dataset.empty()) serve_options.dataset = seed_dataset;
    if (!ui_dir.empty()) serve_options.ui_dir = ui_dir;
    return incorr::serve(serve_options);
  } catch (const incorr::ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_findings(e.findings());
    return kExitIo;
  } catch (const incorr::Error& e) {
    std::cerr << "error: " << incorr::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
