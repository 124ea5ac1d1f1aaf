#ifndef HERO_SUPERVISOR_HPP
#define HERO_SUPERVISOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "hero/health.hpp"
#include "hero/streams.hpp"

namespace hero {

enum class StreamState { Initializing, Healthy, Suspect, Failed, Reinitializing };

const char* to_string(StreamState s);

struct LifecycleConfig {
  double suspect_grace = 0.5;   // s a stream may stay Suspect before Failed
  double reinit_delay = 1.0;    // s a commanded re-initialization takes
  double recover_window = 1.0;  // s of clean checks required after re-init
};

struct StreamStatus {
  StreamState state = StreamState::Initializing;
  double last_msg_stamp = 0.0;
  std::optional<CheckId> failure_reason;
  int epoch = 0;
};

/// Lifecycle state machine for one odometry stream.
///
/// Initializing -> Healthy on clean checks (immediately at startup, after
/// recover_window of clean checks following a re-init). Healthy -> Suspect
/// on a soft failure, back on recovery, Failed when the suspicion outlives
/// suspect_grace or any check fails hard. Failed streams wait for a reinit
/// command; Reinitializing ends after reinit_delay with an incremented
/// epoch and a probation window.
class StreamSupervisor {
 public:
  StreamSupervisor(std::string stream_id, LifecycleConfig cfg);

  const std::string& stream_id() const { return id_; }
  const StreamStatus& status() const { return status_; }
  StreamState state() const { return status_.state; }
  int epoch() const { return status_.epoch; }

  /// Applies the verdicts computed for an arriving message.
  /// Throws IllegalTransition while the stream is Reinitializing: a stream
  /// must not emit before its re-initialization completes.
  void ingest(const OdometryMessage& msg, const std::vector<CheckResult>& verdicts);

  /// Applies verdicts produced without a message (gap detection, voting).
  void evaluate(double now, const std::vector<CheckResult>& verdicts);

  /// Failed -> Reinitializing. Throws IllegalTransition from any other state.
  void command_reinit(double now);

  /// Completes a pending re-initialization once reinit_delay has elapsed:
  /// Reinitializing -> Initializing with epoch + 1. Returns true on the
  /// tick the stream restarts.
  bool poll_reinit(double now);

  bool eligible() const { return status_.state == StreamState::Healthy; }

 private:
  void apply(double now, const std::vector<CheckResult>& verdicts, bool from_message);
  void fail(CheckId reason);

  std::string id_;
  LifecycleConfig cfg_;
  StreamStatus status_;
  double suspect_since_ = 0.0;
  double reinit_until_ = 0.0;
  // Probation deadline; unset during the initial startup epoch, where the
  // first clean message makes the stream Healthy right away.
  std::optional<double> probation_until_;
};

}  // namespace hero

#endif  // HERO_SUPERVISOR_HPP
