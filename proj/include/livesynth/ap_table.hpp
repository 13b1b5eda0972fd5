#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "livesynth/formula.hpp"

namespace livesynth {

enum class PropKind { Input, Output };

/// The partition AP = I ∪ O of one problem instance. Order of declaration
/// is preserved; it fixes bit positions of input valuations.
class ApTable {
public:
  ApTable() = default;
  ApTable(std::vector<std::string> inputs, std::vector<std::string> outputs) {
    for (auto& n : inputs)
      add(n, PropKind::Input);
    for (auto& n : outputs)
      add(n, PropKind::Output);
  }

  void add(const std::string& name, PropKind kind) {
    PropId id = PropRegistry::intern(name);
    if (declared(id)) {
      if (kind_of(id) != kind)
        throw Error("proposition '" + name + "' declared as both input and output");
      return;
    }
    (kind == PropKind::Input ? inputs_ : outputs_).push_back(id);
  }

  bool declared(PropId p) const { return is_input(p) || is_output(p); }
  bool is_input(PropId p) const {
    return std::find(inputs_.begin(), inputs_.end(), p) != inputs_.end();
  }
  bool is_output(PropId p) const {
    return std::find(outputs_.begin(), outputs_.end(), p) != outputs_.end();
  }
  PropKind kind_of(PropId p) const {
    if (is_input(p))
      return PropKind::Input;
    if (is_output(p))
      return PropKind::Output;
    throw Error("undeclared proposition '" + PropRegistry::name(p) + "'");
  }

  const std::vector<PropId>& inputs() const { return inputs_; }
  const std::vector<PropId>& outputs() const { return outputs_; }
  std::vector<PropId> all() const {
    auto v = inputs_;
    v.insert(v.end(), outputs_.begin(), outputs_.end());
    return v;
  }
  std::size_t size() const { return inputs_.size() + outputs_.size(); }

  /// Union of two tables; kinds must agree on shared names.
  ApTable merged(const ApTable& o) const {
    ApTable r = *this;
    for (PropId p : o.inputs_)
      r.add(PropRegistry::name(p), PropKind::Input);
    for (PropId p : o.outputs_)
      r.add(PropRegistry::name(p), PropKind::Output);
    return r;
  }

  /// The letter whose input part is given by bit i of `mask` for the i-th
  /// declared input.
  Letter input_letter(std::uint64_t mask) const {
    Letter l;
    for (std::size_t i = 0; i < inputs_.size(); ++i)
      if ((mask >> i) & 1U)
        l.insert(inputs_[i]);
    return l;
  }

  Letter output_letter(std::uint64_t mask) const {
    Letter l;
    for (std::size_t i = 0; i < outputs_.size(); ++i)
      if ((mask >> i) & 1U)
        l.insert(outputs_[i]);
    return l;
  }

  std::uint64_t input_mask(const Letter& l) const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < inputs_.size(); ++i)
      if (l.contains(inputs_[i]))
        m |= std::uint64_t{1} << i;
    return m;
  }

  std::uint64_t output_mask(const Letter& l) const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < outputs_.size(); ++i)
      if (l.contains(outputs_[i]))
        m |= std::uint64_t{1} << i;
    return m;
  }

  /// Throws if `f` mentions a proposition not declared here.
  void check_declared(const Formula& f) const {
    for (PropId p : props_of(f))
      if (!declared(p))
        throw Error("undeclared proposition '" + PropRegistry::name(p) + "'");
  }

  void check_letter(const Letter& l) const {
    for (PropId p : l.props())
      if (!declared(p))
        throw Error("undeclared proposition '" + PropRegistry::name(p) + "'");
  }

  friend bool operator==(const ApTable&, const ApTable&) = default;

private:
  std::vector<PropId> inputs_;
  std::vector<PropId> outputs_;
};

}  // namespace livesynth
