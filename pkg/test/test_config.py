import unittest

from cutfsci.config import REQUIRED_SECTIONS, get_config, section_values
from cutfsci.log import get_logger

logger = get_logger()


class TestConfig(unittest.TestCase):

    def test_config_ops(self):
        config = get_config()
        logger.debug(config.sections())
        for section in REQUIRED_SECTIONS:
            self.assertIn(section, config.sections())

    def test_section_values(self):
        values = section_values('interface', {'gamma_f0': float, 'gamma_t0': float, 'unknown_key': float})
        self.assertEqual(values, {'gamma_f0': 10.0, 'gamma_t0': None})

    def test_raw_float_format(self):
        self.assertEqual(get_config()['output']['float_format'], '%.10e')


if __name__ == '__main__':
    unittest.main()
