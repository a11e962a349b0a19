#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace richtab {

/// Pipeline stage an error originated from. Used to tag CLI diagnostics.
enum class Stage { Config, Ingest, Fingering, Annotation, Export, Stats };

const char* stage_name(Stage stage);

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Malformed Standard MIDI File. `offset` is the absolute byte offset of the fault.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EmptyMelodyError : public Error {
 public:
  explicit EmptyMelodyError(const std::string& what) : Error(Stage::Ingest, what) {}
};

class MonophonyError : public Error {
 public:
  explicit MonophonyError(std::vector<std::pair<std::size_t, std::size_t>> pairs);
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

class UnplayableNoteError : public Error {
 public:
  UnplayableNoteError(std::size_t note_index, int pitch);
  std::size_t note_index() const noexcept { return note_index_; }
  int pitch() const noexcept { return pitch_; }

 private:
  std::size_t note_index_;
  int pitch_;
};

/// The layered graph has no path: the frontier is empty at `layer`.
class NoFeasiblePathError : public Error {
 public:
  explicit NoFeasiblePathError(std::size_t layer);
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

class InstanceTooLargeError : public Error {
 public:
  explicit InstanceTooLargeError(const std::string& what) : Error(Stage::Fingering, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Stage::Config, what) {}
};

class EmptyCorpusError : public Error {
 public:
  explicit EmptyCorpusError(const std::string& what) : Error(Stage::Stats, what) {}
};

/// Malformed or unusable MusicXML input.
class XmlError : public Error {
 public:
  explicit XmlError(const std::string& what) : Error(Stage::Export, what) {}
};

}  // namespace richtab
