"""Truncated q-series: arithmetic, Pochhammer symbols and the h_b family."""

from qtails.series import (
    TruncatedSeries,
    first_difference,
    h_series,
    invert,
    qpoch_finite,
    qpoch_infinite_power,
)

# coefficients of q^0..q^N, exact Python ints
x = TruncatedSeries.from_coeffs([1, -1], order=8)   # 1 - q
print(invert(x))                                   # 1 + q + ... + q^8

# (q;q)_3 is a polynomial; (q;q)_inf is Euler's function
print(qpoch_finite(1, 3, 10))
euler = qpoch_infinite_power(1, 1, 30)
print(euler)                                       # nonzero only at pentagonal numbers

# negative powers count coloured partitions
print(qpoch_infinite_power(1, -5, 6).coeffs)       # (1, 5, 20, 65, 190, 506, 1265)

# h_b: theta series for odd b, false theta for even b
for b in range(1, 7):
    print(b, h_series(b, 16))

# h_3 is Euler's function again
print(first_difference(h_series(3, 200), qpoch_infinite_power(1, 1, 200)))   # None

# h_4 and h_5 first disagree at q^3
print(first_difference(h_series(4, 20), h_series(5, 20)))

# operators work too; orders shrink to the smaller operand
y = h_series(4, 10) * h_series(5, 6)
print(y.order, y)
