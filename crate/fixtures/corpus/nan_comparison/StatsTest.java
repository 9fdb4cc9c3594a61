package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class StatsTest {
    @Test
    public void emptyMeanIsNaN() {
        assertTrue(new Stats().showBug(new double[0]));
    }
}
