"""Metrics CSV Output Generator Implementation"""
import csv
from pathlib import Path
from typing import Dict, List, Sequence

from ..interfaces.output_generator import OutputGenerator
from ..metrics.report import MetricsReport
from ..utils.logger import get_logger


class MetricsCSVGenerator(OutputGenerator[Sequence[MetricsReport]]):
    """
    Comma-separated metrics table.

    One header row, then one row per MetricsReport with reals at 9
    significant digits.
    """

    extension = ".csv"

    def __init__(self):
        """Initialize CSV generator"""
        self.logger = get_logger()

    def generate(self, content: Sequence[MetricsReport], output_path: str) -> bool:
        """
        Write a complete table, replacing any existing file.

        Args:
            content: Reports in row order
            output_path: Output file path

        Returns:
            True if successful
        """
        output_file = self.prepare_path(output_path)
        try:
            with open(output_file, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(MetricsReport.HEADER)
                for report in content:
                    writer.writerow(report.to_row())
        except OSError as e:
            self.logger.error(f"Error writing metrics CSV: {str(e)}")
            raise
        return True

    def append(self, report: MetricsReport, output_path: str) -> bool:
        """
        Append one row, writing the header first if the file is new.

        Args:
            report: Row to add
            output_path: Output file path
        """
        output_file = Path(output_path)
        if not output_file.exists():
            return self.generate([report], output_path)
        try:
            with open(output_file, 'a', encoding='utf-8', newline='') as f:
                csv.writer(f, lineterminator='\n').writerow(report.to_row())
        except OSError as e:
            self.logger.error(f"Error appending to metrics CSV: {str(e)}")
            raise
        return True

    def read_rows(self, output_path: str) -> List[Dict[str, str]]:
        """Rows of an existing table as column-name mappings, in file order"""
        with open(output_path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))

    def truncate_after(self, output_path: str, images_seen: int) -> int:
        """
        Drop rows recorded after ``images_seen`` images.

        Args:
            output_path: Existing CSV
            images_seen: Last image count to keep

        Returns:
            Number of rows kept
        """
        output_file = Path(output_path)
        if not output_file.exists():
            return 0
        with open(output_file, 'r', encoding='utf-8', newline='') as f:
            rows = list(csv.reader(f))
        column = MetricsReport.HEADER.index("images_seen")
        kept = [row for row in rows[1:] if int(row[column]) <= images_seen]
        with open(output_file, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(MetricsReport.HEADER)
            writer.writerows(kept)
        return len(kept)

    def get_format_name(self) -> str:
        """Get format name"""
        return "CSV"
