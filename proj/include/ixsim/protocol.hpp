#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixsim/messages.hpp"

namespace ixsim
{

using ordered_json = nlohmann::ordered_json;

/// Raised when a message cannot be encoded (non-finite numbers).
class EncodeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A line that could not be turned into a message. The stream continues.
struct FrameError
{
  std::string line;
  std::string reason;

  friend bool operator==(const FrameError &, const FrameError &) = default;
};

using FrameResult = std::variant<Message, FrameError>;

/// One frame: a single JSON object, "type" first, terminated by LF.
std::string encode(const Message & msg);

/// JSON object for a message (without the framing LF).
ordered_json to_json(const Message & msg);

/// Parses one line (without LF). Malformed input comes back as FrameError.
FrameResult decode_line(std::string_view line);

struct DecodeOutput
{
  std::vector<FrameResult> frames;
  std::string remaining;  ///< trailing bytes without a terminating LF
};

/// Splits `buffer` into LF-terminated frames and decodes each one.
DecodeOutput decode(std::string_view buffer);

/// Stateful wrapper around decode() that keeps partial frames across reads.
class FrameDecoder
{
public:
  std::vector<FrameResult> feed(std::string_view bytes);
  /// Complete raw lines, without decoding them.
  std::vector<std::string> feed_lines(std::string_view bytes);
  const std::string & pending() const { return buffer_; }

private:
  std::string buffer_;
};

// Shared JSON helpers, also used by the trial log.
ordered_json pose_to_json(const Pose & p);
Pose pose_from_json(const ordered_json & j);
ordered_json event_to_json(const TrialEvent & e);
TrialEvent event_from_json(const ordered_json & j);

}  // namespace ixsim
