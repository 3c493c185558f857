# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Plain-text tables for the command line.'''


def _cell(value):
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, float):
        return f'{value:.9f}'
    if value is None:
        return '-'
    return str(value)


def rows_lines(header, rows):
    '''A generator returning aligned lines for a header and rows.

    Numeric columns are right-aligned, others left-aligned.'''
    cells = [[_cell(value) for value in row] for row in rows]
    widths = [len(name) for name in header]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    numeric = [bool(rows) and all(isinstance(row[n], (int, float))
                                  and not isinstance(row[n], bool)
                                  for row in rows)
               for n in range(len(header))]

    def fmt(row):
        return ' '.join(c.rjust(w) if right else c.ljust(w)
                        for c, w, right in zip(row, widths, numeric))

    yield fmt(header).rstrip()
    for row in cells:
        yield fmt(row).rstrip()


def flower_lines(data):
    '''A generator returning lines for the flower table.

    data is a list of dicts as produced by the flower command.'''
    fmt = '{:>3} {:>3} {:<5} {:<10} {:>14} {:>14} {:>12}'
    yield fmt.format('m', 'd', 'which', 'extension', 'value', 'paper_value',
                     'delta')
    for row in data:
        yield fmt.format(row['m'], row['d'], row['which'], row['extension'],
                         f'{row["value"]:.9f}', f'{row["paper_value"]:.9f}',
                         f'{row["delta"]:.3g}')


def suite_lines(data):
    '''A generator returning lines for suite outcomes.'''
    fmt = '{:<40} {:>8} {:>8} {:>14}'
    yield fmt.format('Suite', 'Passed', 'Expected', 'Max violation')
    for outcome in data:
        report = outcome.report
        yield fmt.format(outcome.name, _cell(report.passed),
                         _cell(outcome.expected),
                         f'{report.max_violation:.3g}')
