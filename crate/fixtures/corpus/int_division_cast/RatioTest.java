package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class RatioTest {
    @Test
    public void halfDone() {
        assertEquals(50.0, new Ratio().showBug(1, 2), 0.0001);
    }
}
