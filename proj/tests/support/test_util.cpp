#include "support/test_util.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/xml_parser.hpp>

#include "httplib.h"

namespace testutil {

Ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  Ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

void visit_elements(const Ptree& tree, const std::function<void(const std::string&, const Ptree&)>& fn) {
  for (const auto& [tag, child] : tree) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "<xmltext>") continue;
    fn(tag, child);
    visit_elements(child, fn);
  }
}

std::string attr(const Ptree& element, const std::string& name) {
  return element.get<std::string>("<xmlattr>." + name, "");
}

std::vector<const Ptree*> groups_with_prefix(const Ptree& doc, const std::string& prefix) {
  std::vector<const Ptree*> out;
  visit_elements(doc, [&](const std::string& tag, const Ptree& e) {
    if (tag == "g" && attr(e, "id").rfind(prefix, 0) == 0) out.push_back(&e);
  });
  return out;
}

std::size_t count_tag(const Ptree& tree, const std::string& tag) {
  std::size_t n = 0;
  visit_elements(tree, [&](const std::string& t, const Ptree&) { n += (t == tag); });
  return n;
}

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("incorr-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string cli_path() { return INCORR_CLI_PATH; }
std::filesystem::path data_dir() { return INCORR_TEST_DATA_DIR; }
std::filesystem::path golden_dir() { return INCORR_GOLDEN_DIR; }

LiveServer::LiveServer(incorr::Project project, std::optional<std::filesystem::path> persist)
    : service_(std::make_unique<incorr::ProjectService>(std::move(project), std::move(persist))),
      server_(std::make_unique<httplib::Server>()) {
  incorr::install_routes(*server_, *service_);
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("could not bind a local port");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

LiveServer::~LiveServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace testutil
