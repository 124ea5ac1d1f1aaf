#include "hero/supervisor.hpp"

#include <algorithm>

#include "hero/errors.hpp"

namespace hero {

const char* to_string(StreamState s) {
  switch (s) {
    case StreamState::Initializing: return "initializing";
    case StreamState::Healthy: return "healthy";
    case StreamState::Suspect: return "suspect";
    case StreamState::Failed: return "failed";
    case StreamState::Reinitializing: return "reinitializing";
  }
  return "?";
}

StreamSupervisor::StreamSupervisor(std::string stream_id, LifecycleConfig cfg)
    : id_(std::move(stream_id)), cfg_(cfg) {}

void StreamSupervisor::ingest(const OdometryMessage& msg,
                              const std::vector<CheckResult>& verdicts) {
  if (status_.state == StreamState::Reinitializing) {
    throw IllegalTransition("stream " + id_ + " emitted while reinitializing");
  }
  status_.last_msg_stamp = msg.stamp;
  apply(msg.stamp, verdicts, true);
}

void StreamSupervisor::evaluate(double now, const std::vector<CheckResult>& verdicts) {
  if (status_.state == StreamState::Reinitializing) return;
  apply(now, verdicts, false);
}

void StreamSupervisor::apply(double now, const std::vector<CheckResult>& verdicts,
                             bool from_message) {
  if (status_.state == StreamState::Failed) return;

  const CheckResult* hard = nullptr;
  const CheckResult* soft = nullptr;
  for (const auto& v : verdicts) {
    if (v.verdict == Verdict::HardFail && !hard) hard = &v;
    if (v.verdict == Verdict::SoftFail && !soft) soft = &v;
  }
  const bool clean = !hard && !soft;

  // Promotions require a message whose checks passed; the silent-tick path
  // (gap detection) may only escalate. Otherwise clean between-message
  // ticks would erase a suspicion raised by the message checks.
  switch (status_.state) {
    case StreamState::Initializing:
      if (!clean) {
        // Restart the probation clock; a stream cannot fail out of
        // Initializing, it just never becomes eligible.
        probation_until_ = now + cfg_.recover_window;
        status_.failure_reason = (hard ? hard : soft)->check_id;
      } else if (from_message && (!probation_until_ || now >= *probation_until_)) {
        status_.state = StreamState::Healthy;
        status_.failure_reason.reset();
      }
      break;
    case StreamState::Healthy:
      if (hard) {
        fail(hard->check_id);
      } else if (soft) {
        status_.state = StreamState::Suspect;
        status_.failure_reason = soft->check_id;
        suspect_since_ = now;
      }
      break;
    case StreamState::Suspect:
      if (hard) {
        fail(hard->check_id);
      } else if (clean && from_message) {
        status_.state = StreamState::Healthy;
        status_.failure_reason.reset();
      } else if (!clean && now - suspect_since_ > cfg_.suspect_grace) {
        fail(soft->check_id);
      }
      break;
    case StreamState::Failed:
    case StreamState::Reinitializing:
      break;
  }
}

void StreamSupervisor::fail(CheckId reason) {
  status_.state = StreamState::Failed;
  status_.failure_reason = reason;
}

void StreamSupervisor::command_reinit(double now) {
  if (status_.state != StreamState::Failed) {
    throw IllegalTransition("reinit commanded on stream " + id_ + " in state " +
                            to_string(status_.state));
  }
  status_.state = StreamState::Reinitializing;
  reinit_until_ = now + cfg_.reinit_delay;
}

bool StreamSupervisor::poll_reinit(double now) {
  if (status_.state != StreamState::Reinitializing || now < reinit_until_) return false;
  status_.state = StreamState::Initializing;
  status_.epoch += 1;
  status_.last_msg_stamp = now;
  probation_until_ = now + cfg_.recover_window;
  status_.failure_reason.reset();
  return true;
}

}  // namespace hero
