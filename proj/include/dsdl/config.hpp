#pragma once

#include <map>
#include <string>
#include <vector>

#include "dsdl/model.hpp"

namespace dsdl {

/// Flat key=value run configuration. Every key is known up front so a
/// typo fails loudly; command-line flags override file values.
class RunConfig {
public:
    RunConfig();

    static const std::vector<std::string>& known_keys();

    /// Throws ConfigError for unknown keys.
    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    /// Applies a named lambda/beta preset ("voc" or "coco").
    void apply_preset(const std::string& name);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;

    Hyper hyper() const;
    ArchSpec arch() const;
    SynthSpec synth() const;

    /// The fully resolved configuration, one key=value per line in key
    /// order; logged with every run and written next to artifacts.
    std::string resolved() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace dsdl
