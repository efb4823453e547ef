#include "lerw/uniformizer.hpp"

namespace lerw {

Uniformizer Uniformizer::identity() { return Uniformizer{}; }

Uniformizer Uniformizer::half_disk(double radius, Complex center) {
    Uniformizer u;
    u.identity_ = false;
    u.R_ = radius;
    u.c_ = center;
    u.shift_ = u.psi(-center);
    return u;
}

Uniformizer Uniformizer::for_domain(const Domain& d) {
    if (!d.hole_free()) return identity();
    return half_disk(d.far_radius, Complex(-d.start_x, 0.0));
}

Complex Uniformizer::psi(Complex w) const {
    Complex q = R_ - w;
    return R_ * R_ * w / (q * q);
}

Complex Uniformizer::map(Complex z) const {
    if (identity_) return z;
    return psi(z - c_) - shift_;
}

Complex Uniformizer::unmap(Complex w) const {
    if (identity_) return w;
    Complex s = std::sqrt(1.0 + 4.0 * (w + shift_) / R_);
    if (s.real() < 0.0) s = -s;
    return c_ + R_ * (s - 1.0) / (s + 1.0);
}

Complex Uniformizer::derivative(Complex z) const {
    if (identity_) return 1.0;
    Complex w = z - c_;
    Complex q = R_ - w;
    return R_ * R_ * (R_ + w) / (q * q * q);
}

}  // namespace lerw
