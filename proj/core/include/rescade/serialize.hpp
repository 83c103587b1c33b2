#pragma once

#include <iosfwd>
#include <string>

#include "rescade/cascade.hpp"
#include "rescade/layernet.hpp"
#include "rescade/shallow.hpp"

namespace rescade {

// Plain-text model files. Every double is printed with format_double, so a
// save/load round trip reproduces the parameters bit for bit (and therefore
// every later evaluation).

void save_shallow(const ShallowNet& net, std::ostream& out);
void save_shallow(const ShallowNet& net, const std::string& path);
ShallowNet load_shallow(std::istream& in);
ShallowNet load_shallow(const std::string& path);

void save_cascade(const CascadeModel& model, const std::string& path);
CascadeModel load_cascade(const std::string& path);

void save_layernet(const LayerNetModel& model, const std::string& path);
LayerNetModel load_layernet(const std::string& path);

}  // namespace rescade
