#include "scfault/blackbox.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace scfault {

struct BlackBoxModel::Process {
  pid_t pid = -1;
  FILE* to_child = nullptr;
  FILE* from_child = nullptr;

  explicit Process(const std::string& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0) throw std::runtime_error("black-box model: pipe failed");
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw std::runtime_error("black-box model: pipe failed");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
      close(in_pipe[1]);
      close(out_pipe[0]);
      throw std::runtime_error(std::string("black-box model: cannot start command: ") + std::strerror(rc));
    }
    to_child = fdopen(in_pipe[1], "w");
    from_child = fdopen(out_pipe[0], "r");
  }

  ~Process() {
    if (to_child) fclose(to_child);
    if (from_child) fclose(from_child);
    if (pid > 0) {
      int status = 0;
      waitpid(pid, &status, 0);
    }
  }
};

BlackBoxModel::BlackBoxModel(std::string command, double prefault_active)
    : command_(std::move(command)), prefault_active_(prefault_active) {
  if (command_.empty()) throw std::invalid_argument("black-box model needs a command");
}

BlackBoxModel::~BlackBoxModel() = default;

SequenceSet BlackBoxModel::evaluate(const SequenceSet& v) const {
  std::lock_guard lock(mutex_);
  if (!process_) process_ = std::make_unique<Process>(command_);

  if (std::fprintf(process_->to_child, "%.17g %.17g %.17g %.17g\n", v.pos.real(), v.pos.imag(), v.neg.real(),
                   v.neg.imag()) < 0 ||
      std::fflush(process_->to_child) != 0) {
    process_.reset();
    throw std::runtime_error("black-box model: write to '" + command_ + "' failed");
  }

  char line[512];
  if (!std::fgets(line, sizeof line, process_->from_child)) {
    process_.reset();
    throw std::runtime_error("black-box model: '" + command_ + "' closed its output");
  }
  std::istringstream in(line);
  double a = 0, b = 0, c = 0, d = 0;
  if (!(in >> a >> b >> c >> d)) throw std::runtime_error("black-box model: malformed reply: " + std::string(line));

  SequenceSet out;
  out.pos = {a, b};
  out.neg = {c, d};
  return out;
}

}  // namespace scfault
