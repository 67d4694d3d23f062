#pragma once

namespace fracvar {

// Gamma function, accurate to ~15 significant digits.
// Lanczos approximation (g = 7, 9 terms) with the reflection
// formula for arguments below 1/2. Throws DomainError at the
// poles (non-positive integers).
double gamma_fn(double x);

}  // namespace fracvar
