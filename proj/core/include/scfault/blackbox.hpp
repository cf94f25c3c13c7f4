#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "scfault/ibr_model.hpp"

namespace scfault {

// Model evaluated by an external command. Each evaluation writes one line
// "v1_re v1_im v2_re v2_im" to the command's stdin and reads one line
// "i1_re i1_im i2_re i2_im" back, all on the unit base. The command is started
// lazily through /bin/sh and kept alive for the lifetime of the model.
class BlackBoxModel : public IbrModel {
 public:
  BlackBoxModel(std::string command, double prefault_active);
  ~BlackBoxModel() override;

  BlackBoxModel(const BlackBoxModel&) = delete;
  BlackBoxModel& operator=(const BlackBoxModel&) = delete;

  std::string kind() const override { return "blackbox"; }
  SequenceSet evaluate(const SequenceSet& v) const override;
  double prefault_active_current() const override { return prefault_active_; }

  const std::string& command() const { return command_; }

 private:
  struct Process;

  std::string command_;
  double prefault_active_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<Process> process_;
};

}  // namespace scfault
